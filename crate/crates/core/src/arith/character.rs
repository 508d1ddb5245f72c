//! Dirichlet characters with exact root-of-unity values.
//!
//! A character mod `q` is stored as a full value table over residues, each
//! value an exact `e(k/ord)` (or zero off the coprime residues). Groups are
//! built from generators of the unit groups of the prime-power factors of
//! `q`: a primitive root for odd prime powers, 3 for modulus 4, and the pair
//! {-1, 5} for 2^k with k >= 3. Exact values keep long character sums free
//! of drift and make orthogonality checks sharp.

use num::complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use super::factor::{divisors, euler_phi, factorize_small};
use crate::error::{Error, Result};
use crate::scalar::CharValue;

/// One cyclic component of a unit group `(Z/p^k)^*`.
#[derive(Debug, Clone)]
struct CyclicComponent {
    /// Prime-power modulus of the component.
    modulus: u64,
    /// Order of the chosen generator.
    order: u64,
    /// Discrete logs: `dlog[a] = k` with `gen^k = a (mod modulus)`.
    dlog: Vec<Option<u32>>,
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

fn primitive_root_odd_prime_power(p: u64, k: u32) -> u64 {
    let phi_p = p - 1;
    let prime_factors: Vec<u64> = factorize_small(phi_p).into_iter().map(|(q, _)| q).collect();
    let mut g = 2;
    loop {
        if prime_factors.iter().all(|&q| pow_mod(g, phi_p / q, p) != 1) {
            break;
        }
        g += 1;
    }
    if k == 1 {
        return g;
    }
    // g lifts to p^k unless g^(p-1) = 1 (mod p^2), in which case g + p does.
    let p2 = p * p;
    if pow_mod(g % p2, p - 1, p2) == 1 {
        g + p
    } else {
        g
    }
}

fn cyclic_component(modulus: u64, generator: u64, order: u64) -> CyclicComponent {
    let mut dlog = vec![None; modulus as usize];
    let mut a = 1u64 % modulus;
    for k in 0..order {
        dlog[a as usize] = Some(k as u32);
        a = a * (generator % modulus) % modulus;
    }
    CyclicComponent { modulus, order, dlog }
}

/// Decomposition of `(Z/q)^*` into cyclic components with dlog tables.
struct UnitGroup {
    modulus: u64,
    components: Vec<CyclicComponent>,
    /// lcm of the component orders (exponent of the group).
    exponent: u64,
}

impl UnitGroup {
    fn new(q: u64) -> Self {
        let mut components = Vec::new();
        for (p, k) in factorize_small(q) {
            if p == 2 {
                match k {
                    1 => {}
                    2 => components.push(cyclic_component(4, 3, 2)),
                    _ => {
                        let m = 1u64 << k;
                        components.push(cyclic_component(m, m - 1, 2));
                        components.push(cyclic_component(m, 5, 1 << (k - 2)));
                    }
                }
            } else {
                let m = p.pow(k);
                let g = primitive_root_odd_prime_power(p, k);
                components.push(cyclic_component(m, g, euler_phi(m)));
            }
        }
        let exponent = components
            .iter()
            .fold(1u64, |acc, c| num::integer::lcm(acc, c.order));
        UnitGroup { modulus: q, components, exponent }
    }

    /// Component exponents of a residue coprime to the modulus.
    fn dlogs(&self, a: u64) -> Option<Vec<u32>> {
        self.components
            .iter()
            .map(|c| c.dlog[(a % c.modulus) as usize])
            .collect()
    }
}

/// A Dirichlet character mod `q` with exact values.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    conductor: u64,
    index: u64,
    /// Order of the character in the dual group.
    order: u64,
    /// `values[a]` for residues `a mod q`; zero when `gcd(a, q) > 1`.
    values: Vec<CharValue>,
}

impl DirichletCharacter {
    /// The character mod 1 (identically 1).
    pub fn trivial() -> Self {
        DirichletCharacter {
            modulus: 1,
            conductor: 1,
            index: 0,
            order: 1,
            values: vec![CharValue::one()],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Identifier unique within the group mod q (mixed-radix over the
    /// component exponents; 0 is the principal character).
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// All values lie in {0, ±1}; such characters stay exact in rational mode.
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn eval(&self, a: i64) -> CharValue {
        let r = a.rem_euclid(self.modulus as i64) as usize;
        self.values[r]
    }

    pub fn eval_c64(&self, a: i64) -> Complex64 {
        self.eval(a).to_c64()
    }

    /// Value at `a` of the character mod `m` induced by this (primitive)
    /// character: the plain value when `gcd(a, m) = 1`, zero otherwise.
    pub fn eval_induced(&self, a: i64, m: u64) -> CharValue {
        debug_assert!(m % self.modulus == 0, "inducing modulus must be a multiple");
        let r = a.rem_euclid(m as i64) as u64;
        if num::integer::gcd(r, m) != 1 {
            CharValue::Zero
        } else {
            self.eval(r as i64)
        }
    }

    /// Pointwise product table, used by the group-closure check.
    pub fn value_product(&self, other: &DirichletCharacter) -> Vec<CharValue> {
        assert_eq!(self.modulus, other.modulus);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x.mul(y))
            .collect()
    }

    pub fn values(&self) -> &[CharValue] {
        &self.values
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DirichletCharacter", 2)?;
        s.serialize_field("modulus", &self.modulus)?;
        s.serialize_field("index", &self.index)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for DirichletCharacter {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            modulus: u64,
            index: u64,
        }
        let r = Repr::deserialize(deserializer)?;
        let group = character_group(r.modulus).map_err(serde::de::Error::custom)?;
        group
            .characters()
            .iter()
            .find(|c| c.index() == r.index)
            .cloned()
            .ok_or_else(|| {
                serde::de::Error::custom(format!(
                    "no character with index {} mod {}",
                    r.index, r.modulus
                ))
            })
    }
}

/// The full group of `phi(q)` characters mod `q`.
pub struct CharGroup {
    modulus: u64,
    characters: Vec<DirichletCharacter>,
}

impl CharGroup {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.characters
    }

    pub fn principal(&self) -> &DirichletCharacter {
        &self.characters[0]
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Reduced residues mod q, ascending. For q = 1 this is `[1]` by
    /// convention (every integer is in the single class).
    pub fn reduced_residues(&self) -> Vec<u64> {
        reduced_residues(self.modulus)
    }
}

pub fn reduced_residues(q: u64) -> Vec<u64> {
    if q == 1 {
        return vec![1];
    }
    (1..=q).filter(|&a| num::integer::gcd(a, q) == 1).collect()
}

/// Smallest `f | q` such that the character is trivial on residues
/// `a ≡ 1 (mod f)` coprime to `q`.
fn conductor_of(values: &[CharValue], q: u64) -> u64 {
    for f in divisors(q) {
        let mut induced = true;
        // The stride visits exactly the residues a ≡ 1 (mod f).
        let mut a = 1u64;
        while a <= q {
            let r = a % q;
            if num::integer::gcd(r, q) == 1 && values[r as usize] != CharValue::one() {
                induced = false;
                break;
            }
            a += f;
        }
        if induced {
            return f;
        }
    }
    q
}

/// Builds the group of all `phi(q)` Dirichlet characters mod `q`.
pub fn character_group(q: u64) -> Result<CharGroup> {
    if q == 0 {
        return Err(Error::domain("character group modulus must be positive"));
    }
    if q == 1 {
        return Ok(CharGroup {
            modulus: 1,
            characters: vec![DirichletCharacter::trivial()],
        });
    }
    if q > 1 << 20 {
        return Err(Error::resource(format!(
            "character group mod {q} exceeds the supported table size"
        )));
    }
    let group = UnitGroup::new(q);
    let orders: Vec<u64> = group.components.iter().map(|c| c.order).collect();
    let phi: u64 = orders.iter().product::<u64>().max(1);
    let exponent = group.exponent;

    // Precompute dlog tuples for every residue.
    let mut residue_logs: Vec<Option<Vec<u32>>> = Vec::with_capacity(q as usize);
    for a in 0..q {
        if num::integer::gcd(a, q) == 1 {
            residue_logs.push(group.dlogs(a));
        } else {
            residue_logs.push(None);
        }
    }

    let mut characters = Vec::with_capacity(phi as usize);
    for index in 0..phi {
        // Decode the mixed-radix index into component exponents.
        let mut rem = index;
        let mut tuple = Vec::with_capacity(orders.len());
        for &m in &orders {
            tuple.push((rem % m) as u32);
            rem /= m;
        }
        let mut values = Vec::with_capacity(q as usize);
        let mut char_order = 1u64;
        for logs in &residue_logs {
            match logs {
                None => values.push(CharValue::Zero),
                Some(es) => {
                    let mut num = 0u64;
                    for ((&c, &e), &m) in tuple.iter().zip(es).zip(&orders) {
                        num = (num + (c as u64 * e as u64 % m) * (exponent / m)) % exponent;
                    }
                    let v = CharValue::root(num, exponent);
                    if let CharValue::Root { den, .. } = v {
                        char_order = num::integer::lcm(char_order, den as u64);
                    }
                    values.push(v);
                }
            }
        }
        let conductor = conductor_of(&values, q);
        characters.push(DirichletCharacter {
            modulus: q,
            conductor,
            index,
            order: char_order,
            values,
        });
    }
    Ok(CharGroup { modulus: q, characters })
}

/// Every primitive character with conductor `f <= bound`, sorted by
/// (conductor, index). The trivial character mod 1 is included.
pub fn primitive_characters_up_to(bound: u64) -> Result<Vec<DirichletCharacter>> {
    let mut out = Vec::new();
    for f in 1..=bound {
        let group = character_group(f)?;
        out.extend(
            group
                .characters()
                .iter()
                .filter(|c| c.is_primitive())
                .cloned(),
        );
    }
    Ok(out)
}
