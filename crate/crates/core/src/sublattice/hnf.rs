use ibig::IBig;
use serde::Serialize;

/// Integer row lattice in Hermite normal form.
///
/// Rows are ordered by strictly increasing pivot column, pivots are positive,
/// and every entry above a pivot lies in `[0, pivot)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Hnf {
    width: usize,
    rows: Vec<Vec<IBig>>,
}

fn zero() -> IBig {
    IBig::from(0u8)
}

fn pivot_of(row: &[IBig]) -> Option<usize> {
    row.iter().position(|c| *c != zero())
}

impl Hnf {
    pub fn new(width: usize) -> Hnf {
        Hnf { width, rows: Vec::new() }
    }

    pub fn from_rows(width: usize, rows: impl IntoIterator<Item = Vec<IBig>>) -> Hnf {
        let mut h = Hnf::new(width);
        for r in rows {
            h.insert(r);
        }
        h
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<IBig>] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| pivot_of(r).expect("HNF rows are nonzero")).collect()
    }

    /// Adds a generator and restores the normal form.
    pub fn insert(&mut self, mut v: Vec<IBig>) {
        assert_eq!(v.len(), self.width, "row width mismatch");
        let mut i = 0;
        while let Some(fv) = pivot_of(&v) {
            if i == self.rows.len() {
                self.rows.push(v);
                break;
            }
            let p = pivot_of(&self.rows[i]).expect("HNF rows are nonzero");
            if fv < p {
                self.rows.insert(i, v);
                break;
            }
            if fv == p {
                let r = &self.rows[i];
                let (g, a, b) = r[p].extended_gcd(&v[p]);
                let rp = &r[p] / &g;
                let vp = &v[p] / &g;
                let new_r: Vec<IBig> = r.iter().zip(&v).map(|(x, y)| &a * x + &b * y).collect();
                let new_v: Vec<IBig> = r.iter().zip(&v).map(|(x, y)| &rp * y - &vp * x).collect();
                self.rows[i] = new_r;
                v = new_v;
            }
            i += 1;
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        let pivots = self.pivots();
        for (i, &p) in pivots.iter().enumerate() {
            if self.rows[i][p] < zero() {
                for c in self.rows[i].iter_mut() {
                    *c = -&*c;
                }
            }
            let (above, rest) = self.rows.split_at_mut(i);
            let row = &rest[0];
            for other in above.iter_mut() {
                let q = floor_div(&other[p], &row[p]);
                if q != zero() {
                    for (x, y) in other.iter_mut().zip(row) {
                        *x -= &q * y;
                    }
                }
            }
        }
    }

    /// Exact membership by back-substitution.
    pub fn contains(&self, v: &[IBig]) -> bool {
        assert_eq!(v.len(), self.width, "row width mismatch");
        let mut v = v.to_vec();
        for row in &self.rows {
            let p = pivot_of(row).expect("HNF rows are nonzero");
            if v[..p].iter().any(|c| *c != zero()) {
                return false;
            }
            if v[p] == zero() {
                continue;
            }
            if &v[p] % &row[p] != zero() {
                return false;
            }
            let q = &v[p] / &row[p];
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        v.iter().all(|c| *c == zero())
    }

    /// `[Z^width : L]` when the lattice has full rank, else `None`.
    pub fn index(&self) -> Option<IBig> {
        if self.rank() < self.width {
            return None;
        }
        let mut prod = IBig::from(1u8);
        for (i, row) in self.rows.iter().enumerate() {
            prod *= &row[i];
        }
        Some(prod)
    }
}

fn floor_div(a: &IBig, b: &IBig) -> IBig {
    let q = a / b;
    if (a % b != zero()) && ((*a < zero()) != (*b < zero())) {
        q - IBig::from(1u8)
    } else {
        q
    }
}

#[derive(Serialize)]
struct HnfView {
    width: usize,
    rows: Vec<Vec<String>>,
}

impl Serialize for Hnf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HnfView {
            width: self.width,
            rows: self.rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect(),
        }
        .serialize(s)
    }
}
