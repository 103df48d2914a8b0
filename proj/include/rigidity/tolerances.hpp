#pragma once

namespace rigidity {

/// One tolerance regime per run. Every certificate records the regime it was produced under.
struct Tolerances {
    /// Relative singular-value cut for kernel dimensions: sigma_i < rank * sigma_max counts as zero.
    double rank = 1e-10;
    /// Relative eigenvalue cut for signatures: |lambda| < spectral * max|lambda| counts as zero.
    double spectral = 1e-10;
    /// A rank decision whose singular-value gap ratio is below this is indeterminate.
    double min_gap_ratio = 1e3;
    /// sigma_2 / sigma_1 threshold for accepting a rank-one witness.
    double rank_one = 1e-8;
    /// Membership / substitution residual threshold (relative to coefficient scale).
    double residual = 1e-8;

    /// Overrides both relative cuts; used by --tol and RIGIDITY_LAB_TOL.
    static Tolerances with_relative(double rel) {
        Tolerances t;
        t.rank = rel;
        t.spectral = rel;
        return t;
    }
};

} // namespace rigidity
