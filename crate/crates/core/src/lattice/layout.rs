//! Unrotated planar surface-code geometry on a square cell grid.
//!
//! Cells with even `r + c` hold data qubits. Odd cells hold ancillas: Z-type on
//! odd rows and X-type on even rows. Z-type ancillas therefore detect bit flips
//! whose chains terminate on the first and last rows, while X-type ancillas
//! detect phase flips whose chains terminate on the first and last columns.
//!
//! A `MergedRough` layout places two distance-`d` patches side by side with a
//! single junction column between them. The junction holds `d - 1` sandwiched
//! data qubits on odd rows and `d` new X-type ancillas on even rows, which are
//! only measured while the patches are merged.

use super::LatticeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Data,
    AncX,
    AncZ,
    Void,
}

impl CellKind {
    pub fn is_ancilla(self) -> bool {
        matches!(self, CellKind::AncX | CellKind::AncZ)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Single,
    MergedRough,
}

/// Pauli type of an error component, stabilizer or logical operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    /// Ancilla kind whose stabilizer anticommutes with this error component.
    pub fn detected_by(self) -> CellKind {
        match self {
            Pauli::X => CellKind::AncZ,
            Pauli::Z => CellKind::AncX,
        }
    }
}

/// A logical operator: a Pauli string over data cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalOp {
    pub name: &'static str,
    pub pauli: Pauli,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeLayout {
    d: usize,
    shape: Shape,
    rows: usize,
    cols: usize,
    kinds: Vec<CellKind>,
    neighbours: Vec<Vec<usize>>,
    x_boundary: Vec<bool>,
    z_boundary: Vec<bool>,
    logical_ops: Vec<LogicalOp>,
    patches: Vec<(usize, usize)>,
    junction_col: Option<usize>,
}

impl CodeLayout {
    pub fn build(d: usize, shape: Shape) -> Result<Self, LatticeError> {
        if d < 3 || d % 2 == 0 {
            return Err(LatticeError::InvalidDistance(d));
        }
        let side = 2 * d - 1;
        let (cols, patches, junction_col) = match shape {
            Shape::Single => (side, vec![(0, side - 1)], None),
            Shape::MergedRough => (
                2 * side + 1,
                vec![(0, side - 1), (side + 1, 2 * side)],
                Some(side),
            ),
        };
        let rows = side;
        let n = rows * cols;

        let mut kinds = Vec::with_capacity(n);
        for r in 0..rows {
            for c in 0..cols {
                kinds.push(if (r + c) % 2 == 0 {
                    CellKind::Data
                } else if r % 2 == 1 {
                    CellKind::AncZ
                } else {
                    CellKind::AncX
                });
            }
        }

        let mut neighbours = vec![Vec::new(); n];
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if kinds[i] == CellKind::Void {
                    continue;
                }
                let mut around = Vec::with_capacity(4);
                if r > 0 {
                    around.push(i - cols);
                }
                if c > 0 {
                    around.push(i - 1);
                }
                if c + 1 < cols {
                    around.push(i + 1);
                }
                if r + 1 < rows {
                    around.push(i + cols);
                }
                around.retain(|&j| kinds[j] != CellKind::Void);
                neighbours[i] = around;
            }
        }

        let mut x_boundary = vec![false; n];
        let mut z_boundary = vec![false; n];
        for &(c0, c1) in &patches {
            for r in 0..rows {
                for c in c0..=c1 {
                    let i = r * cols + c;
                    if kinds[i] != CellKind::Data {
                        continue;
                    }
                    if r == 0 || r == rows - 1 {
                        x_boundary[i] = true;
                    }
                    if c == c0 || c == c1 {
                        z_boundary[i] = true;
                    }
                }
            }
        }

        let row0 = |c0: usize, c1: usize| -> Vec<usize> {
            (c0..=c1).filter(|&c| kinds[c] == CellKind::Data).collect()
        };
        let column = |c: usize| -> Vec<usize> {
            (0..rows)
                .map(|r| r * cols + c)
                .filter(|&i| kinds[i] == CellKind::Data)
                .collect()
        };
        let logical_ops = match shape {
            Shape::Single => vec![
                LogicalOp {
                    name: "Z",
                    pauli: Pauli::Z,
                    support: row0(0, side - 1),
                },
                LogicalOp {
                    name: "X",
                    pauli: Pauli::X,
                    support: column(0),
                },
            ],
            Shape::MergedRough => {
                let mut zz = row0(patches[0].0, patches[0].1);
                zz.extend(row0(patches[1].0, patches[1].1));
                vec![
                    LogicalOp {
                        name: "ZZ",
                        pauli: Pauli::Z,
                        support: zz,
                    },
                    LogicalOp {
                        name: "X_A",
                        pauli: Pauli::X,
                        support: column(patches[0].0),
                    },
                    LogicalOp {
                        name: "X_B",
                        pauli: Pauli::X,
                        support: column(patches[1].1),
                    },
                ]
            }
        };

        Ok(Self {
            d,
            shape,
            rows,
            cols,
            kinds,
            neighbours,
            x_boundary,
            z_boundary,
            logical_ops,
            patches,
            junction_col,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cell(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        r * self.cols + c
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell / self.cols, cell % self.cols)
    }

    pub fn kind(&self, cell: usize) -> CellKind {
        self.kinds[cell]
    }

    pub fn kind_at(&self, r: usize, c: usize) -> CellKind {
        self.kinds[self.cell(r, c)]
    }

    /// In-grid orthogonal neighbours. For an ancilla these are exactly the data
    /// qubits of its stabilizer.
    pub fn neighbours(&self, cell: usize) -> &[usize] {
        &self.neighbours[cell]
    }

    pub fn cells_of(&self, kind: CellKind) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_cells()).filter(move |&i| self.kinds[i] == kind)
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    /// Data cells on the first or last row of a patch (bit-flip chains end here).
    pub fn x_boundary_mask(&self) -> &[bool] {
        &self.x_boundary
    }

    /// Data cells on the first or last column of a patch (phase-flip chains end here).
    pub fn z_boundary_mask(&self) -> &[bool] {
        &self.z_boundary
    }

    pub fn logical_ops(&self) -> &[LogicalOp] {
        &self.logical_ops
    }

    /// Inclusive column ranges of the code patches.
    pub fn patches(&self) -> &[(usize, usize)] {
        &self.patches
    }

    pub fn junction_col(&self) -> Option<usize> {
        self.junction_col
    }

    pub fn is_junction(&self, cell: usize) -> bool {
        self.junction_col == Some(cell % self.cols)
    }
}
