use super::{CellId, Multidegree, Presheaf};
use crate::verdict::{Certificate, Verdict, Witness};

impl Presheaf {
    /// Checks every simplicial identity, within and across directions, on
    /// every stored cell.
    pub fn validate(&self) -> Verdict {
        let mut checked = 0;
        for d in self.degrees() {
            for c in 0..self.count(d) as CellId {
                if let Some(identity) = self.violated_identity(d, c) {
                    return Verdict::fails(Witness::Identity { degree: d.to_string(), cell: c, identity });
                }
                checked += 1;
            }
        }
        Verdict::holds(Certificate::Identities { cells_checked: checked })
    }

    fn has_degen(&self, d: Multidegree, dir: usize) -> bool {
        d.get(dir) < self.trunc.get(dir)
    }

    fn violated_identity(&self, d: Multidegree, c: CellId) -> Option<String> {
        for a in 0..self.arity {
            let m = d.get(a);
            // d_i d_j = d_{j-1} d_i for i < j
            if m >= 2 {
                let l1 = d.lowered(a);
                for j in 1..=m {
                    for i in 0..j {
                        let lhs = self.face(l1, a, i, self.face(d, a, j, c));
                        let rhs = self.face(l1, a, j - 1, self.face(d, a, i, c));
                        if lhs != rhs {
                            return Some(format!("d{i} d{j} = d{} d{i} (direction {a})", j - 1));
                        }
                    }
                }
            }
            if self.has_degen(d, a) {
                let up = d.raised(a);
                for j in 0..=m {
                    let s = self.degen(d, a, j, c);
                    for i in 0..=m + 1 {
                        let lhs = self.face(up, a, i, s);
                        let rhs = if i == j || i == j + 1 {
                            c
                        } else if i < j {
                            self.degen(d.lowered(a), a, j - 1, self.face(d, a, i, c))
                        } else {
                            self.degen(d.lowered(a), a, j, self.face(d, a, i - 1, c))
                        };
                        if lhs != rhs {
                            return Some(format!("d{i} s{j} (direction {a})"));
                        }
                    }
                }
                if self.has_degen(up, a) {
                    // s_i s_j = s_{j+1} s_i for i <= j
                    for j in 0..=m {
                        for i in 0..=j {
                            let lhs = self.degen(up, a, i, self.degen(d, a, j, c));
                            let rhs = self.degen(up, a, j + 1, self.degen(d, a, i, c));
                            if lhs != rhs {
                                return Some(format!("s{i} s{j} = s{} s{i} (direction {a})", j + 1));
                            }
                        }
                    }
                }
            }
            for b in 0..self.arity {
                if a == b {
                    continue;
                }
                if let Some(msg) = self.cross_violation(d, c, a, b) {
                    return Some(msg);
                }
            }
        }
        None
    }

    /// Operators in distinct directions `a` and `b` commute.
    fn cross_violation(&self, d: Multidegree, c: CellId, a: usize, b: usize) -> Option<String> {
        let (ma, mb) = (d.get(a), d.get(b));
        let msg = |op: &str| Some(format!("{op} commute across directions {a} and {b}"));
        if ma >= 1 && mb >= 1 && a < b {
            for i in 0..=ma {
                for j in 0..=mb {
                    let lhs = self.face(d.lowered(a), b, j, self.face(d, a, i, c));
                    let rhs = self.face(d.lowered(b), a, i, self.face(d, b, j, c));
                    if lhs != rhs {
                        return msg("faces");
                    }
                }
            }
        }
        if ma >= 1 && self.has_degen(d, b) {
            for i in 0..=ma {
                for j in 0..=mb {
                    let lhs = self.degen(d.lowered(a), b, j, self.face(d, a, i, c));
                    let rhs = self.face(d.raised(b), a, i, self.degen(d, b, j, c));
                    if lhs != rhs {
                        return msg("faces and degeneracies");
                    }
                }
            }
        }
        if a < b && self.has_degen(d, a) && self.has_degen(d, b) {
            for i in 0..=ma {
                for j in 0..=mb {
                    let lhs = self.degen(d.raised(a), b, j, self.degen(d, a, i, c));
                    let rhs = self.degen(d.raised(b), a, i, self.degen(d, b, j, c));
                    if lhs != rhs {
                        return msg("degeneracies");
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn representables_validate() {
        assert!(shapes::delta(3, 4).unwrap().validate().is_holds());
        assert!(shapes::f2(1, 2, crate::presheaf::Multidegree::new(&[2, 2, 1]).unwrap()).unwrap().validate().is_holds());
    }

    #[test]
    fn broken_face_is_reported() {
        let x = shapes::delta(1, 1).unwrap();
        let mut faces = x.faces.clone();
        let top = x.flat(Multidegree::new(&[1]).unwrap());
        // d0 of the degenerate edge on vertex 0 now lands on vertex 1
        faces[top][0][0][0] = 1;
        let broken = Presheaf::from_tables(x.trunc, x.counts.clone(), faces, x.degens.clone()).unwrap();
        assert!(broken.validate().is_fails());
    }
}
