use super::{FinError, FinMap, Shape};

/// A finite monoid given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinMonoid {
    names: Vec<String>,
    unit: u64,
    /// `mult[a * n + b] = a · b`.
    mult: Vec<u64>,
}

impl FinMonoid {
    pub fn new(names: Vec<String>, unit: u64, mult: Vec<u64>) -> Result<FinMonoid, FinError> {
        let n = names.len() as u64;
        if n == 0 {
            return Err(FinError::MonoidLawViolation("empty carrier".into()));
        }
        if mult.len() as u64 != n * n || mult.iter().any(|&v| v >= n) {
            return Err(FinError::BadTable(format!("a {n}-element monoid needs an {n}x{n} table")));
        }
        let m = FinMonoid { names, unit, mult };
        m.check_laws()?;
        Ok(m)
    }

    pub fn trivial() -> FinMonoid {
        FinMonoid::new(vec!["e".into()], 0, vec![0]).expect("trivial monoid")
    }

    pub fn z2() -> FinMonoid {
        FinMonoid::new(vec!["0".into(), "1".into()], 0, vec![0, 1, 1, 0]).expect("Z2")
    }

    /// Parses the table format: the first line lists the carrier atoms, and
    /// each following line is the row of products for one atom, in order. The
    /// unit is found from the table.
    pub fn parse(src: &str) -> Result<FinMonoid, FinError> {
        let mut lines = src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let names: Vec<String> = lines
            .next()
            .ok_or_else(|| FinError::BadTable("missing carrier line".into()))?
            .split_whitespace()
            .map(String::from)
            .collect();
        let index = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .map(|i| i as u64)
                .ok_or_else(|| FinError::BadTable(format!("unknown atom `{s}`")))
        };
        let mut mult = Vec::with_capacity(names.len() * names.len());
        let mut rows = 0;
        for line in lines {
            let row: Vec<&str> = line.split_whitespace().collect();
            if row.len() != names.len() {
                return Err(FinError::BadTable(format!("row `{line}` has {} entries, expected {}", row.len(), names.len())));
            }
            for s in row {
                mult.push(index(s)?);
            }
            rows += 1;
        }
        if rows != names.len() {
            return Err(FinError::BadTable(format!("{rows} rows for {} atoms", names.len())));
        }
        let n = names.len() as u64;
        let unit = (0..n)
            .find(|&e| (0..n).all(|a| mult[(e * n + a) as usize] == a && mult[(a * n + e) as usize] == a))
            .ok_or_else(|| FinError::MonoidLawViolation("no two-sided unit".into()))?;
        FinMonoid::new(names, unit, mult)
    }

    /// The product monoid `M^n`, with the first coordinate most significant.
    /// `M^0` is trivial.
    pub fn power(&self, n: u32) -> Result<FinMonoid, FinError> {
        let k = self.size();
        let size = k.checked_pow(n).filter(|&s| s <= 1 << 12).ok_or_else(|| FinError::TooLarge(format!("M^{n}")))?;
        let digits = |mut a: u64| {
            let mut out = vec![0; n as usize];
            for d in out.iter_mut().rev() {
                *d = a % k;
                a /= k;
            }
            out
        };
        let names = (0..size)
            .map(|a| digits(a).iter().map(|&d| self.names[d as usize].as_str()).collect::<Vec<_>>().join("."))
            .map(|s| if s.is_empty() { "e".to_string() } else { s })
            .collect();
        let mut mult = Vec::with_capacity((size * size) as usize);
        for a in 0..size {
            let da = digits(a);
            for b in 0..size {
                let db = digits(b);
                mult.push(da.iter().zip(&db).fold(0, |acc, (&x, &y)| acc * k + self.mul(x, y)));
            }
        }
        let unit = (0..n).fold(0, |acc, _| acc * k + self.unit);
        FinMonoid::new(names, unit, mult)
    }

    pub fn size(&self) -> u64 {
        self.names.len() as u64
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.mult[(a * self.size() + b) as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn carrier(&self) -> Shape {
        Shape::atom("M", self.size())
    }

    /// The multiplication `M x M -> M` as a map.
    pub fn mult_map(&self) -> FinMap {
        let c = self.carrier();
        FinMap::table(&Shape::prod(&c, &c), &c, self.mult.clone()).expect("valid table")
    }

    pub fn check_laws(&self) -> Result<(), FinError> {
        let n = self.size();
        if self.unit >= n {
            return Err(FinError::MonoidLawViolation(format!("unit {} outside the carrier", self.unit)));
        }
        for a in 0..n {
            if self.mul(self.unit, a) != a || self.mul(a, self.unit) != a {
                return Err(FinError::MonoidLawViolation(format!("{} is not a unit for {}", self.unit, a)));
            }
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(FinError::MonoidLawViolation(format!("({a}{b}){c} differs from {a}({b}{c})")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_and_parsed_monoids() {
        assert_eq!(FinMonoid::z2().mul(1, 1), 0);
        assert_eq!(FinMonoid::parse("0 1\n0 1\n1 0\n").unwrap(), FinMonoid::z2());
        let max = FinMonoid::parse("a b\na b\nb b").unwrap();
        assert_eq!(max.unit(), 0);
        assert!(matches!(FinMonoid::parse("a b\nb a\na a"), Err(FinError::MonoidLawViolation(_))));
        assert!(matches!(FinMonoid::parse("a b\na b"), Err(FinError::BadTable(_))));
        // x·y = x has no unit
        assert!(FinMonoid::new(vec!["x".into(), "y".into()], 0, vec![0, 0, 1, 1]).is_err());
    }

    #[test]
    fn powers() {
        let z2 = FinMonoid::z2();
        assert_eq!(z2.power(0).unwrap().size(), 1);
        assert_eq!(z2.power(1).unwrap(), z2);
        let sq = z2.power(2).unwrap();
        assert_eq!(sq.size(), 4);
        // (1,0)(1,1) = (0,1)
        assert_eq!(sq.mul(2, 3), 1);
        assert_eq!(sq.names()[2], "1.0");
    }
}
