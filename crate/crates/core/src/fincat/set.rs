//! The category of finite sets.

use super::{exp_apply, exp_encode, pair, unpair, Category, Ccc, FinMap, Mor, Shape};

#[derive(Clone, Copy, Debug, Default)]
pub struct FinSet;

impl Category for FinSet {
    fn name(&self) -> String {
        "FinSet".into()
    }

    fn hom_domain(&self, x: &Shape) -> Shape {
        x.clone()
    }

    fn identity(&self, x: &Shape) -> Mor {
        Mor::new(x, x, FinMap::lazy(x, x, |e| e))
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Mor {
        debug_assert_eq!(f.tgt, g.src, "composing {} -> {} with {} -> {}", f.src, f.tgt, g.src, g.tgt);
        Mor::new(&f.src, &g.tgt, g.map.after(&f.map))
    }
}

impl Ccc for FinSet {
    fn proj1(&self, x: &Shape, y: &Shape) -> Mor {
        let p = Shape::prod(x, y);
        let right = y.clone();
        Mor::new(&p, x, FinMap::lazy(&p, x, move |e| unpair(&right, e).0))
    }

    fn proj2(&self, x: &Shape, y: &Shape) -> Mor {
        let p = Shape::prod(x, y);
        let right = y.clone();
        Mor::new(&p, y, FinMap::lazy(&p, y, move |e| unpair(&right, e).1))
    }

    fn pairing(&self, f: &Mor, g: &Mor) -> Mor {
        debug_assert_eq!(f.src, g.src);
        let p = Shape::prod(&f.tgt, &g.tgt);
        let (fm, gm, right) = (f.map.clone(), g.map.clone(), g.tgt.clone());
        Mor::new(&f.src, &p, FinMap::lazy(f.map.dom(), &p, move |e| pair(&right, fm.apply(e), gm.apply(e))))
    }

    fn bang(&self, x: &Shape) -> Mor {
        let one = Shape::unit();
        Mor::new(x, &one, FinMap::lazy(x, &one, |_| 0))
    }

    fn exponential(&self, x: &Shape, y: &Shape) -> Shape {
        Shape::exp(x, y)
    }

    fn eval(&self, x: &Shape, y: &Shape) -> Mor {
        let e = Shape::exp(x, y);
        let p = Shape::prod(&e, x);
        let (dx, dy) = (x.clone(), y.clone());
        Mor::new(
            &p,
            y,
            FinMap::lazy(&p, y, move |v| {
                let (h, a) = unpair(&dx, v);
                exp_apply(&dx, &dy, h, a)
            }),
        )
    }

    fn curry(&self, f: &Mor) -> Mor {
        let (z, x) = f.src.factors().expect("curry needs a product domain");
        let (z, x) = (z.clone(), x.clone());
        let e = Shape::exp(&x, &f.tgt);
        let (fm, cod, dx) = (f.map.clone(), f.tgt.clone(), x.clone());
        let n = x.size().expect("indexable");
        Mor::new(&z, &e, FinMap::lazy(&z, &e, move |c| exp_encode(&cod, (0..n).map(|a| fm.apply(pair(&dx, c, a))))))
    }
}
