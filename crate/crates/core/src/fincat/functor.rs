use std::rc::Rc;

use super::{
    mor_agree, power_comonad, truth, Agreement, Budget, Ccc, CoKleisli, Comonad, FinError, FinMap,
    FinMonoid, FinSet, LawReport, Mor, Shape,
};

type ObjFn = Rc<dyn Fn(&Shape) -> Shape>;
type MorFn = Rc<dyn Fn(&Mor) -> Mor>;

/// A functor between tabulated cartesian closed categories.
#[derive(Clone)]
pub struct Functor {
    pub name: String,
    pub src: Rc<dyn Ccc>,
    pub tgt: Rc<dyn Ccc>,
    obj: ObjFn,
    fmap: MorFn,
}

impl Functor {
    pub fn new(
        name: &str,
        src: Rc<dyn Ccc>,
        tgt: Rc<dyn Ccc>,
        obj: impl Fn(&Shape) -> Shape + 'static,
        fmap: impl Fn(&Mor) -> Mor + 'static,
    ) -> Functor {
        Functor { name: name.to_string(), src, tgt, obj: Rc::new(obj), fmap: Rc::new(fmap) }
    }

    pub fn obj(&self, x: &Shape) -> Shape {
        (self.obj)(x)
    }

    pub fn fmap(&self, f: &Mor) -> Mor {
        (self.fmap)(f)
    }

    /// `F(X x Y) -> FX x FY`.
    fn split(&self, x: &Shape, y: &Shape) -> Mor {
        let s = self.src.as_ref();
        self.tgt.pairing(&self.fmap(&s.proj1(x, y)), &self.fmap(&s.proj2(x, y)))
    }

    /// Inverse of `split`: the identity when `F` preserves products strictly,
    /// otherwise a table inverse, which needs a target tabulated over its objects.
    fn merge(&self, x: &Shape, y: &Shape) -> Result<Mor, FinError> {
        let split = self.split(x, y);
        if split.src == split.tgt {
            let id = self.tgt.identity(&split.src);
            if mor_agree(&split, &id, &Budget::default()).holds() {
                return Ok(id);
            }
        }
        tabulated(self.tgt.as_ref(), &split.src)?;
        let table = split.map.to_table()?;
        let n = split.tgt.try_size()?;
        let mut inverse = vec![u64::MAX; n as usize];
        for (i, &v) in table.iter().enumerate() {
            if inverse[v as usize] != u64::MAX {
                return Err(FinError::MonoidalLawViolation(format!("{} does not preserve {x} x {y}", self.name)));
            }
            inverse[v as usize] = i as u64;
        }
        if inverse.contains(&u64::MAX) {
            return Err(FinError::MonoidalLawViolation(format!("{} does not preserve {x} x {y}", self.name)));
        }
        Ok(Mor::new(&split.tgt, &split.src, FinMap::table(&split.tgt, &split.src, inverse)?))
    }

    /// The unique map `1 -> F1`.
    fn unit_map(&self) -> Result<Mor, FinError> {
        let one = Shape::unit();
        let f1 = self.obj(&one);
        if f1.size() != Some(1) {
            return Err(FinError::MonoidalLawViolation(format!("{} sends 1 to {f1}", self.name)));
        }
        let dom = self.tgt.hom_domain(&one);
        Ok(Mor::new(&one, &f1, FinMap::lazy(&dom, &f1, |_| 0)))
    }
}

fn tabulated(c: &dyn Ccc, x: &Shape) -> Result<(), FinError> {
    if c.hom_domain(x) == *x {
        Ok(())
    } else {
        Err(FinError::Untabulated(c.name()))
    }
}

pub fn identity_functor(c: Rc<dyn Ccc>) -> Functor {
    Functor {
        name: format!("identity on {}", c.name()),
        src: c.clone(),
        tgt: c,
        obj: Rc::new(|x| x.clone()),
        fmap: Rc::new(|f| f.clone()),
    }
}

/// `(-)^M` as an endofunctor of finite sets.
pub fn power_endofunctor(m: &FinMonoid) -> Result<Functor, FinError> {
    let t = power_comonad(m)?;
    let (t1, t2) = (t.clone(), t);
    Ok(Functor {
        name: format!("(-)^M on FinSet, |M| = {}", m.size()),
        src: Rc::new(FinSet),
        tgt: Rc::new(FinSet),
        obj: Rc::new(move |x| t1.obj(x)),
        fmap: Rc::new(move |f| t2.fmap(f)),
    })
}

/// `F : V_T -> V`, the identity on objects and `F(f) = f ∘ α`.
pub fn normal_underlying_functor(t: &Comonad) -> Functor {
    let (t1, base) = (t.clone(), t.cat.clone());
    Functor {
        name: format!("underlying functor of {}", t.name),
        src: Rc::new(CoKleisli::new(t.clone())),
        tgt: t.cat.clone(),
        obj: Rc::new(|x| x.clone()),
        fmap: Rc::new(move |f: &Mor| base.compose(&f.relabel(&t1.obj(&f.src)), &t1.alpha(&f.src))),
    }
}

/// Functoriality and preservation of finite products.
pub fn check_functor_laws(f: &Functor, objects: &[Shape], budget: &Budget) -> LawReport {
    let (s, t) = (f.src.as_ref(), f.tgt.as_ref());
    let mut r = LawReport::default();
    let mut salt = 0xf00d_u64;
    for x in objects {
        r.record("preserves identities", x, mor_agree(&f.fmap(&s.identity(x)), &t.identity(&f.obj(x)), budget));
        for y in objects {
            salt += 1;
            let (_, fs) = s.homs(x, y, budget, salt);
            let (_, gs) = s.homs(y, x, budget, salt + 7);
            let mut worst = Agreement::Equal { exhaustive: true, points: 0 };
            for (a, b) in fs.iter().zip(gs.iter().cycle()) {
                let o = mor_agree(&f.fmap(&s.compose(b, a)), &t.compose(&f.fmap(b), &f.fmap(a)), budget);
                if !o.holds() {
                    worst = o;
                    break;
                }
            }
            r.record("preserves composition", format!("{x} -> {y}"), worst);
            r.record("preserves products", format!("{x} x {y}"), truth(f.merge(x, y).is_ok()));
        }
    }
    r.record("preserves the terminal object", "1", truth(f.unit_map().is_ok()));
    r
}

/// The comparison family `A(1, X) -> B(1, FX)`, as the codes of the images.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub normal: bool,
    pub witness: Vec<(Shape, Vec<u64>)>,
}

/// The comparison map at one object and whether it is a bijection.
pub fn comparison_at(f: &Functor, x: &Shape) -> Result<(bool, Vec<u64>), FinError> {
    let one = Shape::unit();
    let u = f.unit_map()?;
    let src_dom = f.src.hom_domain(&one);
    let tgt_dom = f.tgt.hom_domain(&one);
    let fx = f.obj(x);
    let count = Shape::exp(&src_dom, x).try_size()?;
    let target_count = Shape::exp(&tgt_dom, &fx).try_size()?;
    if count > 1 << 20 {
        return Err(FinError::TooLarge(format!("hom(1, {x})")));
    }
    let mut codes = Vec::with_capacity(count as usize);
    for c in 0..count {
        let g = Mor::new(&one, x, FinMap::from_code(&src_dom, x, c));
        let image = f.tgt.compose(&f.fmap(&g), &u);
        codes.push(image.map.code()?);
    }
    let mut sorted = codes.clone();
    sorted.sort_unstable();
    sorted.dedup();
    Ok((sorted.len() as u64 == count && count == target_count, codes))
}

pub fn comparison_is_normal(f: &Functor, objects: &[Shape]) -> Result<Comparison, FinError> {
    let mut witness = Vec::new();
    let mut normal = true;
    for x in objects {
        let (bij, codes) = comparison_at(f, x)?;
        normal &= bij;
        witness.push((x.clone(), codes));
    }
    Ok(Comparison { normal, witness })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FfReport {
    pub full_and_faithful: bool,
    pub normal: bool,
    pub strong_closed: bool,
}

impl FfReport {
    /// Full and faithful exactly when normal and strong closed.
    pub fn biconditional_holds(&self) -> bool {
        self.full_and_faithful == (self.normal && self.strong_closed)
    }
}

const FF_ENUMERATION_LIMIT: u64 = 1 << 20;

/// Decides full faithfulness by enumerating hom-sets, and separately
/// normality and strong closedness, on the given objects.
pub fn check_ff_equivalence(f: &Functor, objects: &[Shape]) -> Result<FfReport, FinError> {
    let (s, t) = (f.src.as_ref(), f.tgt.as_ref());
    let mut ff = true;
    for x in objects {
        for y in objects {
            let dom = s.hom_domain(x);
            let count = Shape::exp(&dom, y).try_size()?;
            let (fx, fy) = (f.obj(x), f.obj(y));
            let target = Shape::exp(&t.hom_domain(&fx), &fy).try_size()?;
            if count != target {
                ff = false;
                continue;
            }
            if count > FF_ENUMERATION_LIMIT {
                return Err(FinError::TooLarge(format!("hom({x}, {y})")));
            }
            let mut images: Vec<u64> = (0..count)
                .map(|c| f.fmap(&Mor::new(x, y, FinMap::from_code(&dom, y, c))).map.code())
                .collect::<Result<_, _>>()?;
            images.sort_unstable();
            images.dedup();
            ff &= images.len() as u64 == count;
        }
    }

    let normal = comparison_is_normal(f, objects)?.normal;

    let mut strong_closed = true;
    for x in objects {
        for y in objects {
            let e = s.exponential(x, y);
            let (fe, fx, fy) = (f.obj(&e), f.obj(x), f.obj(y));
            let merged = f.merge(&e, x)?;
            let applied = t.compose(&f.fmap(&s.eval(x, y)), &merged);
            let theta = t.curry(&applied);
            tabulated(t, &fe)?;
            let target = t.exponential(&fx, &fy);
            let n = fe.try_size()?;
            if Some(n) != target.size() {
                strong_closed = false;
                continue;
            }
            if n > FF_ENUMERATION_LIMIT {
                return Err(FinError::TooLarge(fe.to_string()));
            }
            let mut image: Vec<u64> = (0..n).map(|v| theta.map.apply(v)).collect();
            image.sort_unstable();
            image.dedup();
            strong_closed &= image.len() as u64 == n;
        }
    }
    Ok(FfReport { full_and_faithful: ff, normal, strong_closed })
}

/// A category enriched in a tabulated cartesian closed category.
#[derive(Clone)]
pub struct EnrichedCat {
    pub base: Rc<dyn Ccc>,
    pub objects: Vec<Shape>,
    homs: Vec<Vec<Shape>>,
    /// `comp[i][j][k] : hom(j, k) x hom(i, j) -> hom(i, k)`.
    comp: Vec<Vec<Vec<Mor>>>,
    /// `ident[i] : 1 -> hom(i, i)`.
    ident: Vec<Mor>,
}

impl EnrichedCat {
    pub fn hom(&self, i: usize, j: usize) -> &Shape {
        &self.homs[i][j]
    }

    pub fn comp(&self, i: usize, j: usize, k: usize) -> &Mor {
        &self.comp[i][j][k]
    }

    pub fn ident(&self, i: usize) -> &Mor {
        &self.ident[i]
    }
}

/// A cartesian closed category enriched over itself through its exponentials.
pub fn self_enriched(c: Rc<dyn Ccc>, objects: &[Shape]) -> EnrichedCat {
    let k = c.as_ref();
    let n = objects.len();
    let homs: Vec<Vec<Shape>> =
        objects.iter().map(|x| objects.iter().map(|y| k.exponential(x, y)).collect()).collect();
    let mut comp = vec![vec![Vec::with_capacity(n); n]; n];
    for (i, x) in objects.iter().enumerate() {
        for (j, y) in objects.iter().enumerate() {
            for z in objects {
                let (yz, xy) = (&homs[j][objects.iter().position(|o| o == z).unwrap()], &homs[i][j]);
                let outer = Shape::prod(yz, xy);
                // ((g, f), a) |-> g (f a)
                let p1 = k.proj1(&outer, x);
                let g = k.compose(&k.proj1(yz, xy), &p1);
                let f = k.compose(&k.proj2(yz, xy), &p1);
                let fa = k.compose(&k.eval(x, y), &k.pairing(&f, &k.proj2(&outer, x)));
                let gfa = k.compose(&k.eval(y, z), &k.pairing(&g, &fa));
                comp[i][j].push(k.curry(&gfa));
            }
        }
    }
    let one = Shape::unit();
    let ident = objects.iter().map(|x| k.curry(&k.proj2(&one, x))).collect();
    EnrichedCat { base: c, objects: objects.to_vec(), homs, comp, ident }
}

/// Associativity and unit laws of composition, as equations in the base.
pub fn check_enriched_laws(a: &EnrichedCat, budget: &Budget) -> LawReport {
    let b = a.base.as_ref();
    let n = a.objects.len();
    let mut r = LawReport::default();
    let one = Shape::unit();
    for i in 0..n {
        for j in 0..n {
            let hij = a.hom(i, j);
            let right_unit = b.pairing(&b.identity(hij), &b.bang(hij));
            let via = b.times(&b.identity(hij), a.ident(i));
            let lhs = b.compose(a.comp(i, i, j), &b.compose(&via, &right_unit));
            r.record("right unit", format!("{i} -> {j}"), mor_agree(&lhs, &b.identity(hij), budget));
            let left_unit = b.pairing(&b.bang(hij), &b.identity(hij));
            let via = b.times(a.ident(j), &b.identity(hij));
            let lhs = b.compose(a.comp(i, j, j), &b.compose(&via, &left_unit));
            r.record("left unit", format!("{i} -> {j}"), mor_agree(&lhs, &b.identity(hij), budget));
            let _ = &one;
            for k in 0..n {
                for l in 0..n {
                    let (hkl, hjk) = (a.hom(k, l), a.hom(j, k));
                    let left = b.compose(a.comp(i, j, l), &b.times(a.comp(j, k, l), &b.identity(hij)));
                    let ab = Shape::prod(hkl, hjk);
                    let outer = Shape::prod(&ab, hij);
                    let p1 = b.proj1(&ab, hij);
                    let assoc = b.pairing(
                        &b.compose(&b.proj1(hkl, hjk), &p1),
                        &b.pairing(&b.compose(&b.proj2(hkl, hjk), &p1), &b.proj2(&ab, hij)),
                    );
                    debug_assert_eq!(assoc.src, outer);
                    let right =
                        b.compose(a.comp(i, k, l), &b.compose(&b.times(&b.identity(hkl), a.comp(i, j, k)), &assoc));
                    r.record("associativity", format!("{i} {j} {k} {l}"), mor_agree(&left, &right, budget));
                }
            }
        }
    }
    r
}

/// Transports an enriched category along a product-preserving functor of bases:
/// hom objects `L(A(X, Y))`, composition `L(comp) ∘ φ`, identities `L(id) ∘ φ0`.
pub fn change_of_base(l: &Functor, a: &EnrichedCat) -> Result<EnrichedCat, FinError> {
    let t = l.tgt.as_ref();
    let n = a.objects.len();
    let homs: Vec<Vec<Shape>> = (0..n).map(|i| (0..n).map(|j| l.obj(a.hom(i, j))).collect()).collect();
    let mut comp = vec![vec![Vec::with_capacity(n); n]; n];
    for (i, row) in comp.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for k in 0..n {
                let phi = l.merge(a.hom(j, k), a.hom(i, j))?;
                cell.push(t.compose(&l.fmap(a.comp(i, j, k)), &phi));
            }
        }
    }
    let phi0 = l.unit_map()?;
    let ident = (0..n).map(|i| t.compose(&l.fmap(a.ident(i)), &phi0)).collect();
    check_monoidal_coherence(l, a)?;
    Ok(EnrichedCat { base: l.tgt.clone(), objects: a.objects.clone(), homs, comp, ident })
}

/// `φ` is associative on the hom objects of `a`.
fn check_monoidal_coherence(l: &Functor, a: &EnrichedCat) -> Result<(), FinError> {
    let (s, t) = (l.src.as_ref(), l.tgt.as_ref());
    let budget = Budget::default();
    let n = a.objects.len();
    let objs: Vec<&Shape> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a.hom(i, j)).take(3).collect();
    if objs.len() < 3 {
        return Ok(());
    }
    let (x, y, z) = (objs[0], objs[1], objs[2]);
    let (lx, ly, lz) = (l.obj(x), l.obj(y), l.obj(z));
    let xy = Shape::prod(x, y);
    let yz = Shape::prod(y, z);
    // (LX x LY) x LZ -> L((X x Y) x Z) -> L(X x (Y x Z))
    let assoc_src = {
        let p = s.proj1(&xy, z);
        s.pairing(&s.compose(&s.proj1(x, y), &p), &s.pairing(&s.compose(&s.proj2(x, y), &p), &s.proj2(&xy, z)))
    };
    let lxy = Shape::prod(&lx, &ly);
    let assoc_tgt = {
        let p = t.proj1(&lxy, &lz);
        t.pairing(&t.compose(&t.proj1(&lx, &ly), &p), &t.pairing(&t.compose(&t.proj2(&lx, &ly), &p), &t.proj2(&lxy, &lz)))
    };
    let left = t.compose(
        &l.fmap(&assoc_src),
        &t.compose(&l.merge(&xy, z)?, &t.times(&l.merge(x, y)?, &t.identity(&lz))),
    );
    let right = t.compose(
        &l.merge(x, &yz)?,
        &t.compose(&t.times(&t.identity(&lx), &l.merge(y, z)?), &assoc_tgt),
    );
    if mor_agree(&left, &right, &budget).holds() {
        Ok(())
    } else {
        Err(FinError::MonoidalLawViolation(format!("{} is not associative on {x}, {y}, {z}", l.name)))
    }
}

/// Whether the underlying hom-sets of `change_of_base(l, a)` biject with
/// those of `a` through the comparison map of `l`.
pub fn underlying_iso(l: &Functor, a: &EnrichedCat) -> Result<bool, FinError> {
    let n = a.objects.len();
    let mut ok = true;
    for i in 0..n {
        for j in 0..n {
            ok &= comparison_at(l, a.hom(i, j))?.0;
        }
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::Category;

    fn objs(n: u64) -> Vec<Shape> {
        (1..=n).map(|k| Shape::atom("X", k)).collect()
    }

    #[test]
    fn normality_of_the_underlying_functor() {
        for m in [FinMonoid::trivial(), FinMonoid::z2()] {
            let t = power_comonad(&m).unwrap();
            let f = normal_underlying_functor(&t);
            assert!(comparison_is_normal(&f, &objs(3)).unwrap().normal);
            assert!(check_functor_laws(&f, &objs(2), &Budget::default()).all_pass());
            // F(ε) = id
            let two = Shape::atom("X", 2);
            let k = CoKleisli::new(t.clone());
            let fe = f.fmap(&k.identity(&two));
            assert_eq!(fe.map.to_table().unwrap(), vec![0, 1]);
        }
    }

    #[test]
    fn power_endofunctor_is_not_normal() {
        let p = power_endofunctor(&FinMonoid::z2()).unwrap();
        let c = comparison_is_normal(&p, &[Shape::atom("X", 2)]).unwrap();
        assert!(!c.normal);
        assert_eq!(c.witness[0].1, vec![0, 3]);
        assert!(comparison_is_normal(&identity_functor(Rc::new(FinSet)), &objs(3)).unwrap().normal);
    }

    #[test]
    fn ff_biconditional() {
        let id = identity_functor(Rc::new(FinSet));
        let r = check_ff_equivalence(&id, &objs(2)).unwrap();
        assert_eq!(r, FfReport { full_and_faithful: true, normal: true, strong_closed: true });

        let p = power_endofunctor(&FinMonoid::z2()).unwrap();
        let r = check_ff_equivalence(&p, &objs(2)).unwrap();
        assert!(!r.full_and_faithful && !r.normal && r.biconditional_holds());

        let f = normal_underlying_functor(&power_comonad(&FinMonoid::z2()).unwrap());
        let r = check_ff_equivalence(&f, &objs(2)).unwrap();
        assert!(r.normal && !r.strong_closed && !r.full_and_faithful);

        let f = normal_underlying_functor(&power_comonad(&FinMonoid::trivial()).unwrap());
        let r = check_ff_equivalence(&f, &objs(2)).unwrap();
        assert_eq!(r, FfReport { full_and_faithful: true, normal: true, strong_closed: true });
    }

    #[test]
    fn change_of_base_along_identity_and_power() {
        let set: Rc<dyn Ccc> = Rc::new(FinSet);
        let a = self_enriched(set.clone(), &objs(2));
        let budget = Budget::default();
        assert!(check_enriched_laws(&a, &budget).all_pass());
        let same = change_of_base(&identity_functor(set), &a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(same.hom(i, j), a.hom(i, j));
                for k in 0..2 {
                    assert_eq!(same.comp(i, j, k).map.to_table().unwrap(), a.comp(i, j, k).map.to_table().unwrap());
                }
            }
        }
        let p = power_endofunctor(&FinMonoid::z2()).unwrap();
        let twice = change_of_base(&p, &change_of_base(&p, &a).unwrap()).unwrap();
        assert!(check_enriched_laws(&twice, &budget).all_pass());
        let m = FinMonoid::z2().carrier();
        let one = Shape::unit();
        // V(1, □[1, □[X, Y]])
        let nested = Shape::exp(&m, &Shape::exp(&one, &Shape::exp(&m, a.hom(1, 0))));
        assert_eq!(twice.hom(1, 0).size(), nested.size());
        assert!(!underlying_iso(&p, &a).unwrap());
    }

    #[test]
    fn change_of_base_along_the_normal_functor() {
        let t = power_comonad(&FinMonoid::z2()).unwrap();
        let k: Rc<dyn Ccc> = Rc::new(CoKleisli::new(t.clone()));
        let a = self_enriched(k, &objs(2));
        let f = normal_underlying_functor(&t);
        let moved = change_of_base(&f, &a).unwrap();
        assert!(check_enriched_laws(&moved, &Budget::default()).all_pass());
        assert!(underlying_iso(&f, &a).unwrap());
        assert_eq!(moved.hom(0, 1).size(), Some(2));
    }
}
