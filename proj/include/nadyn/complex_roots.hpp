#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nadyn/puiseux.hpp"

namespace nadyn {

struct AberthOptions {
    int max_iterations = 800;
    /// Relative step size at which a root counts as converged.
    double tolerance = 1e-15;
    /// Random rotations of the starting configuration after stagnation.
    int restarts = 4;
    std::uint64_t seed = 12345;
};

/// All roots (with repetition) of sum coeffs[k] z^k by Aberth-Ehrlich
/// simultaneous iteration. Starting points come from the upper convex hull
/// of (k, log|coeffs[k]|). Exact zero roots are split off first. Throws
/// RootFinderNonConvergence.
std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, const AberthOptions& options = {});

struct RootCluster {
    Complex center;
    int multiplicity = 1;
};

struct ClusterOptions {
    /// Backward-error threshold for accepting a group as one multiple root.
    double epsilon = 1e-9;
    /// Initial single-linkage radius, relative to max(1, |z|). An r-fold root
    /// scatters by about eps^{1/r}, so this must stay well above 1e-2.
    double initial_radius = 0.5;
};

/// Groups numerically computed roots into multiple roots. A group is
/// accepted when p^{(j)}(c)/j! vanishes to relative precision `epsilon` for
/// j below its size at the polished centroid c; otherwise it is split at a
/// quarter of the radius. Throws ClusterAmbiguity when the test value falls in
/// (epsilon, 10 epsilon].
std::vector<RootCluster> cluster_roots(std::span<const Complex> coeffs, std::span<const Complex> roots,
                                       const ClusterOptions& options = {});

Complex horner(std::span<const Complex> coeffs, Complex z);

} // namespace nadyn
