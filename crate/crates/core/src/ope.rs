//! The n-th product calculus.
//!
//! All products are computed by a terminating rewriting system on canonical
//! words:
//!
//! * derivative rules `(Da)_(n)b = -n a_(n-1)b` and
//!   `a_(m)(Db) = D(a_(m)b) + m a_(m-1)b`,
//! * skew-symmetry `b_(n)a = e sum_j (-1)^(n+j+1) D^j(a_(n+j)b)/j!`, used so
//!   that only one orientation of every generator pair is stored,
//! * the commutator formula `a_(n):bc: = :(a_(n)b)c: + e:b(a_(n)c): +
//!   sum_{i<n} C(n,i)(a_(i)b)_(n-1-i)c` for `n >= 0`,
//! * quasi-associativity `(:ab:)_(n)c = sum_j a_(-1-j)(b_(n+j)c) +
//!   e sum_j b_(n-1-j)(a_(j)c)`, valid for every integer `n`,
//! * the reordering identity `:ab: - e:ba: = sum_j (-1)^j D^(j+1)(a_(j)b)/(j+1)!`.
//!
//! Here `e = (-1)^{|a||b|}`. Every correction term has a strictly smaller
//! sum of generator weights than the term it corrects, which bounds the
//! recursion. Intermediate results are memoized; the caches never change
//! results and can be switched off.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use crate::arith::{binomial, factorial, falling, int, BigRational};
use crate::coeff::Coeff;
use crate::error::VopaError;
use crate::expr::{Expression, Generators, HalfInt, Letter, Word};

type Shared<C> = Arc<Expression<C>>;

struct Memo<K, C> {
    map: RwLock<HashMap<K, Shared<C>>>,
}

impl<K: Eq + Hash, C> Memo<K, C> {
    fn new() -> Self {
        Memo { map: RwLock::new(HashMap::new()) }
    }

    fn get(&self, k: &K) -> Option<Shared<C>> {
        self.map.read().expect("memo lock").get(k).cloned()
    }

    fn put(&self, k: K, v: Shared<C>) {
        self.map.write().expect("memo lock").insert(k, v);
    }

    fn len(&self) -> usize {
        self.map.read().expect("memo lock").len()
    }

    fn clear(&self) {
        self.map.write().expect("memo lock").clear();
    }
}

struct Caches<C> {
    gen_prod: Memo<(u16, u16, u32), C>,
    prod: Memo<(Word, Word, i64), C>,
    insert: Memo<(Letter, Word), C>,
    nop: Memo<(Word, Word), C>,
    deriv: Memo<Word, C>,
}

impl<C> Caches<C> {
    fn new() -> Self {
        Caches { gen_prod: Memo::new(), prod: Memo::new(), insert: Memo::new(), nop: Memo::new(), deriv: Memo::new() }
    }
}

/// Memo table sizes, for diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub generator_products: usize,
    pub products: usize,
    pub insertions: usize,
    pub normal_orderings: usize,
    pub derivatives: usize,
}

/// The products `a_(n)b`, `n >= 0`, of one ordered pair of generators.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTable<C> {
    pub a: usize,
    pub b: usize,
    /// `products[n] = a_(n)b`; products beyond the end vanish.
    pub products: Vec<Expression<C>>,
}

/// The singular part of an OPE: `(n, a_(n)b)` for the nonzero products with
/// `n >= 0`, in decreasing `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularPart<C> {
    pub poles: Vec<(u32, Expression<C>)>,
}

impl<C: Coeff> SingularPart<C> {
    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// The product `a_(n)b`, zero if absent.
    pub fn product(&self, n: u32) -> Expression<C> {
        self.poles.iter().find(|(m, _)| *m == n).map(|(_, e)| e.clone()).unwrap_or_else(Expression::zero)
    }

    /// Render one line per pole as `N: expr` with pole order `N = n + 1`.
    pub fn render(&self, gens: &Generators, param: &str) -> String {
        let lines: Vec<String> =
            self.poles.iter().map(|(n, e)| format!("{}: {}", n + 1, e.render(gens, param))).collect();
        lines.join("\n")
    }
}

/// Rewriting engine over one presentation with coefficients in `C`.
pub struct Engine<C: Coeff> {
    gens: Generators,
    table: HashMap<(u16, u16), Vec<Shared<C>>>,
    caching: bool,
    caches: Caches<C>,
}

impl<C: Coeff> Engine<C> {
    /// Build an engine from the stored orientations of a table. Entries may
    /// contain non-canonical words; they are normalized by iterating the
    /// engine on its own table until nothing changes.
    pub fn new(gens: Generators, entries: Vec<PairTable<C>>) -> Result<Self, VopaError> {
        let mut entries = entries;
        for _ in 0..16 {
            let engine = Self::raw(gens.clone(), &entries)?;
            if entries.iter().all(|t| t.products.iter().all(Expression::is_canonical)) {
                return Ok(engine);
            }
            let next: Vec<PairTable<C>> = entries
                .iter()
                .map(|t| PairTable {
                    a: t.a,
                    b: t.b,
                    products: t.products.iter().map(|e| engine.canonical_form(e)).collect(),
                })
                .collect();
            if next == entries {
                break;
            }
            entries = next;
        }
        Err(VopaError::Presentation("table entries do not reach a canonical form".into()))
    }

    fn raw(gens: Generators, entries: &[PairTable<C>]) -> Result<Self, VopaError> {
        let mut table = HashMap::new();
        for t in entries {
            let key = (t.a as u16, t.b as u16);
            if table.contains_key(&key) || (t.a != t.b && table.contains_key(&(key.1, key.0))) {
                let (a, b) = (&gens.get(t.a).name, &gens.get(t.b).name);
                return Err(VopaError::Presentation(format!("duplicate table entry for pair ({a}, {b})")));
            }
            let mut products: Vec<Shared<C>> = t.products.iter().cloned().map(Arc::new).collect();
            while products.last().is_some_and(|e| e.is_zero()) {
                products.pop();
            }
            table.insert(key, products);
        }
        Ok(Engine { gens, table, caching: true, caches: Caches::new() })
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    /// Disable or enable memoization. Results are identical either way.
    pub fn set_caching(&mut self, on: bool) {
        self.caching = on;
        self.clear_caches();
    }

    pub fn clear_caches(&self) {
        self.caches.gen_prod.clear();
        self.caches.prod.clear();
        self.caches.insert.clear();
        self.caches.nop.clear();
        self.caches.deriv.clear();
    }

    pub fn cache_stats(&self) -> CacheStats {
        CacheStats {
            generator_products: self.caches.gen_prod.len(),
            products: self.caches.prod.len(),
            insertions: self.caches.insert.len(),
            normal_orderings: self.caches.nop.len(),
            derivatives: self.caches.deriv.len(),
        }
    }

    /// Whether the pair `(a, b)` is stored in this orientation.
    pub fn is_stored(&self, a: usize, b: usize) -> bool {
        self.table.contains_key(&(a as u16, b as u16))
    }

    /// The stored products of `(a, b)` in this orientation, if any.
    pub fn stored(&self, a: usize, b: usize) -> Option<Vec<Expression<C>>> {
        self.table.get(&(a as u16, b as u16)).map(|v| v.iter().map(|e| (**e).clone()).collect())
    }

    fn memo<K: Eq + Hash + Clone>(
        &self,
        memo: &Memo<K, C>,
        key: K,
        compute: impl FnOnce() -> Expression<C>,
    ) -> Shared<C> {
        if self.caching {
            if let Some(v) = memo.get(&key) {
                return v;
            }
        }
        let v = Arc::new(compute());
        if self.caching {
            memo.put(key, v.clone());
        }
        v
    }

    fn odd(&self, l: Letter) -> bool {
        self.gens.letter_is_odd(l)
    }

    fn word_odd(&self, w: &Word) -> bool {
        self.gens.word_is_odd(w)
    }

    fn sign(odd: bool) -> BigRational {
        if odd {
            int(-1)
        } else {
            int(1)
        }
    }

    /// Largest `n` for which `x_(n)y` can be nonzero.
    fn max_product_index(&self, wx: HalfInt, wy: HalfInt) -> i64 {
        (wx + wy).floor() - 1
    }

    // ----- generator products -------------------------------------------

    /// `a_(n)b` for generators `a`, `b` and `n >= 0`.
    pub fn generator_product(&self, a: usize, b: usize, n: u32) -> Expression<C> {
        (*self.gen_prod(a as u16, b as u16, n)).clone()
    }

    fn gen_prod(&self, a: u16, b: u16, n: u32) -> Shared<C> {
        if let Some(v) = self.table.get(&(a, b)) {
            return v.get(n as usize).cloned().unwrap_or_else(|| Arc::new(Expression::zero()));
        }
        if !self.table.contains_key(&(b, a)) {
            return Arc::new(Expression::zero());
        }
        self.memo(&self.caches.gen_prod, (a, b, n), || self.skew_transport(b as usize, a as usize, n))
    }

    /// `b_(n)a` computed from the products `a_(m)b` by skew-symmetry.
    pub fn skew_transport(&self, a: usize, b: usize, n: u32) -> Expression<C> {
        let eps = self.gens.get(a).parity.is_odd() && self.gens.get(b).parity.is_odd();
        let mut out = Expression::zero();
        let top = self.max_product_index(self.gens.get(a).weight, self.gens.get(b).weight);
        for m in n as i64..=top {
            let p = self.gen_prod(a as u16, b as u16, m as u32);
            if p.is_zero() {
                continue;
            }
            let j = (m - n as i64) as u32;
            let mut q = int(if (n + j + 1).is_multiple_of(2) { 1 } else { -1 }) / factorial(j);
            if eps {
                q = -q;
            }
            out.add_scaled_q(&self.deriv_expr_n(&p, j), &q);
        }
        out
    }

    /// `(D^d a)_(n)(D^e b)` for `n >= 0`.
    fn letter_prod(&self, la: Letter, lb: Letter, n: i64) -> Expression<C> {
        let d = la.der as i64;
        let e = lb.der as u32;
        if n < d {
            return Expression::zero();
        }
        let left = falling(n, la.der as u32) * int(if d % 2 == 0 { 1 } else { -1 });
        let m = n - d;
        let mut out = Expression::zero();
        for i in 0..=e.min(m as u32) {
            let p = self.gen_prod(la.gen, lb.gen, (m - i as i64) as u32);
            if p.is_zero() {
                continue;
            }
            let q = &left * binomial(e, i) * falling(m, i);
            out.add_scaled_q(&self.deriv_expr_n(&p, e - i), &q);
        }
        out
    }

    // ----- derivatives --------------------------------------------------

    fn deriv_word(&self, w: &Word) -> Shared<C> {
        if w.is_vacuum() {
            return Arc::new(Expression::zero());
        }
        if w.len() == 1 {
            return Arc::new(Expression::letter(w.letters()[0].derive(1)));
        }
        self.memo(&self.caches.deriv, w.clone(), || {
            let l = w.first().expect("nonempty word");
            let rest = w.rest();
            let mut out = Expression::word(rest.prepend(l.derive(1)));
            for (v, c) in self.deriv_word(&rest).iter() {
                out.add_scaled(&self.insert(l, v), c);
            }
            out
        })
    }

    fn deriv_expr(&self, e: &Expression<C>) -> Expression<C> {
        let mut out = Expression::zero();
        for (w, c) in e.iter() {
            out.add_scaled(&self.deriv_word(w), c);
        }
        out
    }

    fn deriv_expr_n(&self, e: &Expression<C>, times: u32) -> Expression<C> {
        let mut cur = e.clone();
        for _ in 0..times {
            if cur.is_zero() {
                break;
            }
            cur = self.deriv_expr(&cur);
        }
        cur
    }

    fn deriv_word_n(&self, w: &Word, times: u32) -> Expression<C> {
        if times == 0 {
            return Expression::word(w.clone());
        }
        if w.len() == 1 {
            return Expression::letter(w.letters()[0].derive(times));
        }
        self.deriv_expr_n(&self.deriv_word(w), times - 1)
    }

    // ----- normal ordering ------------------------------------------------

    /// `:l w:` for a canonical word `w`.
    fn insert(&self, l: Letter, w: &Word) -> Shared<C> {
        match w.first() {
            None => Arc::new(Expression::letter(l)),
            Some(f) if l <= f => Arc::new(Expression::word(w.prepend(l))),
            Some(f) => self.memo(&self.caches.insert, (l, w.clone()), || {
                // :l :f R:: = e :f :l R:: + :(:lf: - e:fl:) R:
                let rest = w.rest();
                let eps = Self::sign(self.odd(l) && self.odd(f));
                let mut out = Expression::zero();
                for (v, c) in self.insert(l, &rest).iter() {
                    out.add_scaled(&self.insert(f, v), &c.scale(&eps));
                }
                let corr = self.reorder(l, f);
                out.add_expr(&self.nop_expr_word(&corr, &rest));
                out
            }),
        }
    }

    /// `:ab: - e:ba:` for letters `a`, `b`.
    fn reorder(&self, a: Letter, b: Letter) -> Expression<C> {
        let top = self.max_product_index(self.gens.letter_weight(a), self.gens.letter_weight(b));
        let mut out = Expression::zero();
        for j in 0..=top.max(-1) {
            let p = self.letter_prod(a, b, j);
            if p.is_zero() {
                continue;
            }
            let q = int(if j % 2 == 0 { 1 } else { -1 }) / factorial(j as u32 + 1);
            out.add_scaled_q(&self.deriv_expr_n(&p, j as u32 + 1), &q);
        }
        out
    }

    /// `:xy:` for canonical words.
    fn nop(&self, x: &Word, y: &Word) -> Shared<C> {
        if x.is_vacuum() {
            return Arc::new(Expression::word(y.clone()));
        }
        if y.is_vacuum() {
            return Arc::new(Expression::word(x.clone()));
        }
        if x.len() == 1 {
            return self.insert(x.letters()[0], y);
        }
        self.memo(&self.caches.nop, (x.clone(), y.clone()), || {
            let l = x.first().expect("nonempty word");
            let r = x.rest();
            let eps = Self::sign(self.odd(l) && self.word_odd(&r));
            let mut out = Expression::zero();
            for (v, c) in self.nop(&r, y).iter() {
                out.add_scaled(&self.insert(l, v), c);
            }
            let wl = self.gens.letter_weight(l);
            let wr = self.gens.word_weight(&r);
            let wy = self.gens.word_weight(y);
            // :(D^(j+1) l)(r_(j) y): / (j+1)!
            for j in 0..=self.max_product_index(wr, wy) {
                let p = self.prod(&r, y, j);
                if p.is_zero() {
                    continue;
                }
                let q = factorial(j as u32 + 1).recip();
                let dl = l.derive(j as u32 + 1);
                for (v, c) in p.iter() {
                    out.add_scaled(&self.insert(dl, v), &c.scale(&q));
                }
            }
            // e :(D^(j+1) r)(l_(j) y): / (j+1)!
            for j in 0..=self.max_product_index(wl, wy) {
                let p = self.prod(&Word::single(l), y, j);
                if p.is_zero() {
                    continue;
                }
                let q = &eps / factorial(j as u32 + 1);
                let dr = self.deriv_word_n(&r, j as u32 + 1);
                out.add_scaled_q(&self.nop_expr(&dr, &p), &q);
            }
            out
        })
    }

    fn nop_expr_word(&self, x: &Expression<C>, y: &Word) -> Expression<C> {
        let mut out = Expression::zero();
        for (w, c) in x.iter() {
            out.add_scaled(&self.nop(w, y), c);
        }
        out
    }

    fn nop_expr(&self, x: &Expression<C>, y: &Expression<C>) -> Expression<C> {
        let mut out = Expression::zero();
        for (wx, cx) in x.iter() {
            for (wy, cy) in y.iter() {
                out.add_scaled(&self.nop(wx, wy), &cx.mul(cy));
            }
        }
        out
    }

    // ----- products -------------------------------------------------------

    /// `x_(n)y` for canonical words and any integer `n`.
    fn prod(&self, x: &Word, y: &Word, n: i64) -> Shared<C> {
        if n < 0 {
            if x.is_vacuum() {
                return Arc::new(if n == -1 { Expression::word(y.clone()) } else { Expression::zero() });
            }
            let m = (-n - 1) as u32;
            if m == 0 {
                return self.nop(x, y);
            }
            return self.memo(&self.caches.prod, (x.clone(), y.clone(), n), || {
                let dx = self.deriv_word_n(x, m);
                self.nop_expr_word(&dx, y).scaled_q(&factorial(m).recip())
            });
        }
        if x.is_vacuum() || y.is_vacuum() {
            return Arc::new(Expression::zero());
        }
        if n > self.max_product_index(self.gens.word_weight(x), self.gens.word_weight(y)) {
            return Arc::new(Expression::zero());
        }
        self.memo(&self.caches.prod, (x.clone(), y.clone(), n), || {
            if x.len() == 1 {
                self.letter_word_prod(x.letters()[0], y, n)
            } else {
                self.composite_prod(x, y, n)
            }
        })
    }

    /// `l_(n)y` for a letter and `n >= 0`.
    fn letter_word_prod(&self, l: Letter, y: &Word, n: i64) -> Expression<C> {
        let m = y.first().expect("nonempty word");
        if y.len() == 1 {
            return self.letter_prod(l, m, n);
        }
        let r = y.rest();
        let eps = Self::sign(self.odd(l) && self.odd(m));
        // :(l_(n) m) r:
        let mut out = self.nop_expr_word(&self.letter_prod(l, m, n), &r);
        // e :m (l_(n) r):
        for (v, c) in self.prod(&Word::single(l), &r, n).iter() {
            out.add_scaled(&self.insert(m, v), &c.scale(&eps));
        }
        // sum_{i<n} C(n,i) (l_(i) m)_(n-1-i) r
        for i in 0..n {
            let lm = self.letter_prod(l, m, i);
            if lm.is_zero() {
                continue;
            }
            let q = binomial(n as u32, i as u32);
            for (w, c) in lm.iter() {
                out.add_scaled(&self.prod(w, &r, n - 1 - i), &c.scale(&q));
            }
        }
        out
    }

    /// `(:l r:)_(n) y` for `n >= 0` and a word of length at least two.
    fn composite_prod(&self, x: &Word, y: &Word, n: i64) -> Expression<C> {
        let l = x.first().expect("nonempty word");
        let r = x.rest();
        let eps = Self::sign(self.odd(l) && self.word_odd(&r));
        let wr = self.gens.word_weight(&r);
        let wl = self.gens.letter_weight(l);
        let wy = self.gens.word_weight(y);
        let mut out = Expression::zero();
        // sum_j l_(-1-j)(r_(n+j) y) = sum_j :(D^j l)(r_(n+j) y):/j!
        let mut j = 0i64;
        while n + j <= self.max_product_index(wr, wy) {
            let p = self.prod(&r, y, n + j);
            if !p.is_zero() {
                let q = factorial(j as u32).recip();
                let dl = l.derive(j as u32);
                for (v, c) in p.iter() {
                    out.add_scaled(&self.insert(dl, v), &c.scale(&q));
                }
            }
            j += 1;
        }
        // e sum_j r_(n-1-j)(l_(j) y)
        for j in 0..=self.max_product_index(wl, wy) {
            let p = self.prod(&Word::single(l), y, j);
            if p.is_zero() {
                continue;
            }
            for (v, c) in p.iter() {
                out.add_scaled(&self.prod(&r, v, n - 1 - j), &c.scale(&eps));
            }
        }
        out
    }

    // ----- public operations ----------------------------------------------

    /// Canonical form of an expression whose words may be in any letter order.
    pub fn canonical_form(&self, e: &Expression<C>) -> Expression<C> {
        let mut out = Expression::zero();
        for (w, c) in e.iter() {
            out.add_scaled(&self.canonical_word(w), c);
        }
        out
    }

    /// Canonical form of a single right-nested word.
    pub fn canonical_word(&self, w: &Word) -> Expression<C> {
        if w.is_canonical() {
            return Expression::word(w.clone());
        }
        let l = w.first().expect("nonempty word");
        let rest = self.canonical_word(&w.rest());
        let mut out = Expression::zero();
        for (v, c) in rest.iter() {
            out.add_scaled(&self.insert(l, v), c);
        }
        out
    }

    /// `a_(n)b` for canonical expressions.
    pub fn product(&self, a: &Expression<C>, b: &Expression<C>, n: i64) -> Expression<C> {
        let mut out = Expression::zero();
        for (wa, ca) in a.iter() {
            for (wb, cb) in b.iter() {
                out.add_scaled(&self.prod(wa, wb, n), &ca.mul(cb));
            }
        }
        out
    }

    /// `a_(n)b` for arbitrary expressions, canonicalizing the inputs first.
    pub fn nth_product(&self, a: &Expression<C>, b: &Expression<C>, n: i64) -> Expression<C> {
        self.product(&self.canonical_form(a), &self.canonical_form(b), n)
    }

    /// The normally ordered product `:ab:`.
    pub fn wick(&self, a: &Expression<C>, b: &Expression<C>) -> Expression<C> {
        self.nth_product(a, b, -1)
    }

    /// `D e`.
    pub fn derivative(&self, e: &Expression<C>) -> Expression<C> {
        self.deriv_expr(&self.canonical_form(e))
    }

    /// `D^m e`.
    pub fn derivative_n(&self, e: &Expression<C>, m: u32) -> Expression<C> {
        self.deriv_expr_n(&self.canonical_form(e), m)
    }

    /// Largest `n` for which `a_(n)b` can be nonzero, from conformal weights.
    /// Returns `None` when either side is zero.
    pub fn locality_bound(&self, a: &Expression<C>, b: &Expression<C>) -> Option<i64> {
        let wa = a.max_weight(&self.gens)?;
        let wb = b.max_weight(&self.gens)?;
        Some(self.max_product_index(wa, wb))
    }

    /// All nonzero `a_(n)b` with `n >= 0`.
    pub fn ope_singular(&self, a: &Expression<C>, b: &Expression<C>) -> SingularPart<C> {
        let a = self.canonical_form(a);
        let b = self.canonical_form(b);
        let mut poles = Vec::new();
        if let Some(top) = self.locality_bound(&a, &b) {
            for n in (0..=top).rev() {
                let p = self.product(&a, &b, n);
                if !p.is_zero() {
                    poles.push((n as u32, p));
                }
            }
        }
        SingularPart { poles }
    }

    /// `a_(r)(b_(s)c) - e b_(s)(a_(r)c) - sum_i C(r,i)(a_(i)b)_(r+s-i)c`.
    pub fn jacobi_defect(
        &self,
        a: &Expression<C>,
        b: &Expression<C>,
        c: &Expression<C>,
        r: u32,
        s: i64,
    ) -> Expression<C> {
        let (a, b, c) = (self.canonical_form(a), self.canonical_form(b), self.canonical_form(c));
        let r = r as i64;
        let eps = match (a.iter().next(), b.iter().next()) {
            (Some((wa, _)), Some((wb, _))) => Self::sign(self.word_odd(wa) && self.word_odd(wb)),
            _ => int(1),
        };
        let mut out = self.product(&a, &self.product(&b, &c, s), r);
        out.add_scaled_q(&self.product(&b, &self.product(&a, &c, r), s), &-eps);
        for i in 0..=r {
            let ab = self.product(&a, &b, i);
            if ab.is_zero() {
                continue;
            }
            out.add_scaled_q(&self.product(&ab, &c, r + s - i), &-binomial(r as u32, i as u32));
        }
        out
    }

    /// The `(r, s)` window in which a Jacobi defect of generators can be
    /// nonzero: `r, s >= 0` and every term of nonnegative weight.
    pub fn jacobi_window(&self, a: usize, b: usize, c: usize) -> Vec<(u32, i64)> {
        let total = self.gens.get(a).weight + self.gens.get(b).weight + self.gens.get(c).weight;
        let top = total.floor() - 2;
        let mut out = Vec::new();
        for r in 0..=top.max(-1) {
            for s in 0..=(top - r) {
                out.push((r as u32, s));
            }
        }
        out
    }
}

/// A product that must stay affine in unknowns.
pub fn check_linear(e: &Expression<crate::coeff::Symbolic>) -> Result<(), VopaError> {
    if e.iter().any(|(_, c)| c.is_nonlinear()) {
        Err(VopaError::Nonlinear)
    } else {
        Ok(())
    }
}
