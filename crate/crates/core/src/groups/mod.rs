//! Group models, canonical elements, and word-metric geometry.
//!
//! Every element is stored as a canonical byte key, so key equality is group
//! equality and elements can be hashed and ordered. Encodings:
//!
//! | model | key |
//! |-------|-----|
//! | free group `F_k` | freely reduced word, one byte per letter (`2i` = x_i, `2i+1` = x_i⁻¹) |
//! | `Z^d` | `d` zigzag varints |
//! | Heisenberg | `(a, b, c)` of the unitriangular matrix `[[1,a,c],[0,1,b],[0,0,1]]` |
//! | lamplighter `Z/2 ≀ Z` | cursor, then lit lamp positions ascending |
//! | `BS(1,m)` | normal form `t^-p a^q t^r`, `m ∤ q` whenever `p, r > 0` |
//! | finite | table index |
//! | direct product | length-prefixed factor keys |

mod arith;
mod ball;
mod finite;
mod growth;
pub(crate) mod index;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use ball::{word_ball, WordBall};
pub use finite::FiniteTable;
pub use growth::{growth_rate, GrowthRate};

use crate::codec::{Bytes, Reader};
use crate::error::{Error, Result};

/// Canonical byte encoding of a group element.
pub type Key = Bytes;

/// Default cap on enumerated elements.
pub const ELEMENT_BUDGET: usize = 10_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    model: u64,
    key: Key,
}

impl GroupElement {
    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn model_id(&self) -> u64 {
        self.model
    }

    pub(crate) fn from_key(model: u64, key: Key) -> Self {
        GroupElement { model, key }
    }

    pub(crate) fn into_key(self) -> Key {
        self.key
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({:?})", self.key.as_slice())
    }
}

#[derive(Clone, Debug)]
pub enum ModelKind {
    Free { rank: usize },
    FreeAbelian { dim: usize },
    Heisenberg,
    Lamplighter,
    BaumslagSolitar { m: i64 },
    Finite(FiniteTable),
    DirectProduct(Vec<GroupModel>),
}

/// A finitely generated group with a fixed, ordered, symmetric generating set.
#[derive(Clone, Debug)]
pub struct GroupModel {
    kind: ModelKind,
    id: u64,
    descriptor: String,
    generators: Vec<Key>,
    names: Vec<String>,
}

impl GroupModel {
    pub fn free(rank: usize) -> Result<Self> {
        if !(1..=64).contains(&rank) {
            return Err(Error::usage("free group rank must be in 1..=64"));
        }
        let mut generators = Vec::new();
        let mut names = Vec::new();
        for i in 0..rank {
            for letter in [2 * i as u8, 2 * i as u8 + 1] {
                generators.push(Key::from_slice(&[letter]));
            }
            names.extend(letter_names(i));
        }
        Self::build(ModelKind::Free { rank }, format!("free:{rank}"), generators, names)
    }

    pub fn free_abelian(dim: usize) -> Result<Self> {
        if !(1..=26).contains(&dim) {
            return Err(Error::usage("free abelian rank must be in 1..=26"));
        }
        let mut generators = Vec::new();
        let mut names = Vec::new();
        for i in 0..dim {
            for sign in [1i64, -1] {
                let mut k = Key::new();
                for j in 0..dim {
                    crate::codec::put_i64(&mut k, if i == j { sign } else { 0 });
                }
                generators.push(k);
            }
            names.extend(letter_names(i));
        }
        Self::build(ModelKind::FreeAbelian { dim }, format!("abelian:{dim}"), generators, names)
    }

    /// Discrete Heisenberg group with generators X, X⁻¹, Y, Y⁻¹ (named
    /// `a A b B`) and `[X, Y] = Z` central.
    pub fn heisenberg() -> Result<Self> {
        let g = |a: i64, b: i64| {
            let mut k = Key::new();
            for v in [a, b, 0] {
                crate::codec::put_i64(&mut k, v);
            }
            k
        };
        let generators = alloc::vec![g(1, 0), g(-1, 0), g(0, 1), g(0, -1)];
        let names = ["a", "A", "b", "B"].map(String::from).to_vec();
        Self::build(ModelKind::Heisenberg, "heisenberg".into(), generators, names)
    }

    /// Lamplighter `Z/2 ≀ Z` with generators `t` (cursor right), `T` (cursor
    /// left) and the involution `a` (toggle the lamp under the cursor).
    pub fn lamplighter() -> Result<Self> {
        let cursor = |p: i64| {
            let mut k = Key::new();
            crate::codec::put_i64(&mut k, p);
            k
        };
        let mut toggle = cursor(0);
        crate::codec::put_i64(&mut toggle, 0);
        let generators = alloc::vec![cursor(1), cursor(-1), toggle];
        let names = ["t", "T", "a"].map(String::from).to_vec();
        Self::build(ModelKind::Lamplighter, "lamplighter".into(), generators, names)
    }

    /// `BS(1,m) = <a, t | t a t⁻¹ = a^m>` with generators `a A t T`.
    pub fn baumslag_solitar(m: i64) -> Result<Self> {
        if !(1..=1 << 20).contains(&m) {
            return Err(Error::usage("BS(1,m) needs 1 <= m <= 2^20"));
        }
        let nf = |p: u64, q: i64, r: u64| {
            let mut k = Key::new();
            crate::codec::put_u64(&mut k, p);
            crate::codec::put_i64(&mut k, q);
            crate::codec::put_u64(&mut k, r);
            k
        };
        let generators = alloc::vec![nf(0, 1, 0), nf(0, -1, 0), nf(0, 0, 1), nf(1, 0, 0)];
        let names = ["a", "A", "t", "T"].map(String::from).to_vec();
        Self::build(
            ModelKind::BaumslagSolitar { m },
            format!("bs:1:{m}"),
            generators,
            names,
        )
    }

    /// Finite group from a table. `generators` lists element names; `None`
    /// uses every non-identity element. The list is closed under inverses and
    /// must generate the whole group.
    pub fn finite(table: FiniteTable, generators: Option<&[&str]>) -> Result<Self> {
        let mut gens: Vec<u32> = Vec::new();
        match generators {
            None => gens.extend((0..table.order() as u32).filter(|&g| g != table.identity())),
            Some(list) => {
                for name in list {
                    let g = table
                        .index_of(name)
                        .ok_or_else(|| Error::usage(format!("unknown element {name:?}")))?;
                    for h in [g, table.inv(g)] {
                        if !gens.contains(&h) && h != table.identity() {
                            gens.push(h);
                        }
                    }
                }
            }
        }
        if gens.is_empty() && table.order() > 1 {
            return Err(Error::usage("empty generating set"));
        }
        let names: Vec<String> = gens.iter().map(|&g| table.names()[g as usize].clone()).collect();
        let generators = gens
            .iter()
            .map(|&g| {
                let mut k = Key::new();
                crate::codec::put_u64(&mut k, u64::from(g));
                k
            })
            .collect();
        let descriptor = format!(
            "finite:{}:{:016x}:{}",
            table.order(),
            table.fingerprint(),
            names.join(",")
        );
        let order = table.order();
        let model = Self::build(ModelKind::Finite(table), descriptor, generators, names)?;
        let ball = WordBall::enumerate_within(&model, order, order + 1);
        if ball.len() != order {
            return Err(Error::usage("generators do not generate the finite group"));
        }
        Ok(model)
    }

    /// Direct product; generator `g` of factor `i` is named `g_i`.
    pub fn direct_product(factors: Vec<GroupModel>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::usage("direct product needs at least two factors"));
        }
        let ids: Vec<Key> = factors.iter().map(|f| arith::identity(&f.kind)).collect();
        let mut generators = Vec::new();
        let mut names = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            for (g, name) in f.generators.iter().zip(&f.names) {
                let mut k = Key::new();
                for (j, id) in ids.iter().enumerate() {
                    let part = if i == j { g } else { id };
                    crate::codec::put_u64(&mut k, part.len() as u64);
                    k.extend_from_slice(part);
                }
                generators.push(k);
                names.push(format!("{name}_{i}"));
            }
        }
        let descriptor = factors
            .iter()
            .map(|f| f.descriptor.as_str())
            .collect::<Vec<_>>()
            .join("*");
        Self::build(ModelKind::DirectProduct(factors), descriptor, generators, names)
    }

    fn build(kind: ModelKind, descriptor: String, generators: Vec<Key>, names: Vec<String>) -> Result<Self> {
        let mut h = Fnv::default();
        h.write(descriptor.as_bytes());
        let model = GroupModel {
            kind,
            id: h.finish(),
            descriptor,
            generators,
            names,
        };
        for g in &model.generators {
            let gi = arith::inv(&model.kind, g)?;
            if !model.generators.contains(&gi) {
                return Err(Error::usage("generating set is not symmetric"));
            }
        }
        Ok(model)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Stable textual description, also the source of [`GroupModel::id`].
    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::from_key(self.id, arith::identity(&self.kind))
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        self.generators
            .iter()
            .map(|k| GroupElement::from_key(self.id, k.clone()))
            .collect()
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        GroupElement::from_key(self.id, self.generators[i].clone())
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Index of the generator inverse to generator `i`.
    pub fn inverse_generator(&self, i: usize) -> usize {
        let gi = arith::inv(&self.kind, &self.generators[i]).expect("generator inverse");
        self.generators.iter().position(|g| *g == gi).expect("symmetric generating set")
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.model != self.id {
            return Err(Error::ModelMismatch {
                expected: self.id,
                found: g.model,
            });
        }
        Ok(())
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(GroupElement::from_key(self.id, arith::mul(&self.kind, &g.key, &h.key)?))
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement::from_key(self.id, arith::inv(&self.kind, &g.key)?))
    }

    pub(crate) fn mul_keys(&self, a: &[u8], b: &[u8]) -> Result<Key> {
        arith::mul(&self.kind, a, b)
    }

    pub(crate) fn inv_key(&self, a: &[u8]) -> Result<Key> {
        arith::inv(&self.kind, a)
    }

    /// Product of generators, in order.
    pub fn eval_word(&self, word: &[usize]) -> Result<GroupElement> {
        let mut k = arith::identity(&self.kind);
        for &i in word {
            let g = self
                .generators
                .get(i)
                .ok_or_else(|| Error::usage(format!("generator index {i} out of range")))?;
            k = arith::mul(&self.kind, &k, g)?;
        }
        Ok(GroupElement::from_key(self.id, k))
    }

    /// Tokenizes a word over the generator names (longest match first).
    /// `e` and `1` denote the identity unless they are generator names;
    /// whitespace and `.` separate tokens.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.names.len()).collect();
        order.sort_by_key(|&i| core::cmp::Reverse(self.names[i].len()));
        let mut out = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix(|c: char| c.is_whitespace() || c == '.') {
                rest = r;
                continue;
            }
            if let Some(&i) = order.iter().find(|&&i| rest.starts_with(self.names[i].as_str())) {
                out.push(i);
                rest = &rest[self.names[i].len()..];
                continue;
            }
            let id_token = ["e", "1"]
                .into_iter()
                .find(|t| rest.starts_with(t) && !self.names.iter().any(|n| n == t));
            match id_token {
                Some(t) => rest = &rest[t.len()..],
                None => {
                    return Err(Error::usage(format!(
                        "cannot parse {rest:?} as a word over {}",
                        self.names.join(" ")
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        self.eval_word(&self.parse_word(text)?)
    }

    /// Human-readable form of an element.
    pub fn format(&self, g: &GroupElement) -> String {
        format_key(&self.kind, &self.names, &g.key)
    }

    /// Rank `d` when the model is structurally virtually `Z^d` (finite groups
    /// give 0), `None` otherwise.
    pub fn virtual_abelian_rank(&self) -> Option<usize> {
        match &self.kind {
            ModelKind::Finite(_) => Some(0),
            ModelKind::FreeAbelian { dim } => Some(*dim),
            ModelKind::Free { rank: 1 } => Some(1),
            ModelKind::BaumslagSolitar { m: 1 } => Some(2),
            ModelKind::DirectProduct(fs) => fs.iter().map(|f| f.virtual_abelian_rank()).sum(),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.virtual_abelian_rank() == Some(0)
    }
}

fn letter_names(i: usize) -> [String; 2] {
    let c = (b'a' + i as u8) as char;
    [c.to_string(), c.to_ascii_uppercase().to_string()]
}

fn format_key(kind: &ModelKind, names: &[String], key: &[u8]) -> String {
    match kind {
        ModelKind::Free { .. } => {
            if key.is_empty() {
                return "e".into();
            }
            key.iter().map(|&l| names[l as usize].as_str()).collect()
        }
        ModelKind::FreeAbelian { dim } => {
            let mut r = Reader::new(key);
            let parts: Vec<String> = (0..*dim).map(|_| r.i64().to_string()).collect();
            format!("({})", parts.join(","))
        }
        ModelKind::Heisenberg => {
            let [a, b, c] = arith::heis(key);
            format!("({a},{b},{c})")
        }
        ModelKind::Lamplighter => {
            let (p, lit) = arith::lamps(key);
            let lit: Vec<String> = lit.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}@{p}", lit.join(","))
        }
        ModelKind::BaumslagSolitar { .. } => {
            let (p, q, r) = arith::bs(key);
            let mut parts = Vec::new();
            if p > 0 {
                parts.push(format!("t^-{p}"));
            }
            if q != 0 {
                parts.push(format!("a^{q}"));
            }
            if r > 0 {
                parts.push(format!("t^{r}"));
            }
            if parts.is_empty() {
                "e".into()
            } else {
                parts.join(" ")
            }
        }
        ModelKind::Finite(t) => t.names()[Reader::new(key).u64() as usize].clone(),
        ModelKind::DirectProduct(fs) => {
            let mut r = Reader::new(key);
            let parts: Vec<String> = fs
                .iter()
                .map(|f| {
                    let len = r.u64() as usize;
                    format_key(&f.kind, &f.names, r.take(len))
                })
                .collect();
            format!("({})", parts.join(", "))
        }
    }
}

/// 64-bit FNV-1a, used for model fingerprints.
#[derive(Clone, Copy)]
pub(crate) struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    pub(crate) fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn finish(self) -> u64 {
        self.0
    }
}
