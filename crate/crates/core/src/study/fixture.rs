//! Published peak stresses of the 27 mixture combinations, kPa.

use super::{Mixture, MixtureAssignment, Provenance, SweepRow, SweepTable};

/// One row per base (intermediate) course mixture, in DG, PM, SB order.
/// Within a row: surface DG, PM, SB; within each surface block: leveling
/// DG, PM, SB.
const S11: [[f64; 9]; 3] = [
    [484.04, 442.70, 579.34, 481.74, 440.05, 577.42, 530.40, 488.56, 628.70],
    [480.01, 438.97, 574.49, 478.73, 437.35, 573.62, 527.08, 485.54, 624.52],
    [533.16, 489.96, 632.92, 531.91, 488.36, 632.02, 572.41, 528.85, 674.71],
];

const S12: [[f64; 9]; 3] = [
    [515.69, 511.49, 535.84, 516.56, 512.61, 536.61, 504.17, 499.87, 523.29],
    [518.41, 514.29, 538.52, 519.14, 515.27, 539.15, 507.02, 502.79, 526.11],
    [508.22, 504.15, 526.48, 509.22, 505.40, 527.38, 496.05, 491.88, 513.43],
];

/// The published table, ordered surface-major like [`MixtureAssignment::all`].
pub fn published_table() -> SweepTable {
    let mut rows = Vec::with_capacity(27);
    for (si, &surface) in Mixture::ALL.iter().enumerate() {
        for (bi, &intermediate) in Mixture::ALL.iter().enumerate() {
            for (li, &leveling) in Mixture::ALL.iter().enumerate() {
                rows.push(SweepRow {
                    assignment: MixtureAssignment {
                        surface,
                        intermediate,
                        leveling,
                    },
                    s11_peak: S11[bi][3 * si + li],
                    s12_peak: S12[bi][3 * si + li],
                });
            }
        }
    }
    SweepTable::new(rows, Provenance::PaperFixture).expect("fixture is a complete table")
}
