#pragma once

// Universal coefficient bridges between integral homology, integral
// cohomology and (co)homology with finitely generated coefficients.

#include "emtower/fgab.hpp"

#include <vector>

namespace emtower {

/// Groups indexed by degree 0..reliable_up_to.
struct GradedGroups {
    std::vector<FgAbGroup> entries;
    int reliable_up_to = -1;

    GradedGroups() = default;
    explicit GradedGroups(std::vector<FgAbGroup> e) : entries(std::move(e)), reliable_up_to(int(entries.size()) - 1) {}

    bool covers(int degree) const { return degree >= 0 && degree <= reliable_up_to; }
    /// Entry at a degree; negative degrees are zero. Throws
    /// DegreeOutOfRange past the reliability bound.
    FgAbGroup at(int degree) const;

    friend bool operator==(const GradedGroups&, const GradedGroups&) = default;
};

/// H^n(X; G) = Ext(H_{n-1}, G) + Hom(H_n, G) from integral homology.
FgAbGroup cohomology_with_coefficients(const GradedGroups& homology, const FgAbGroup& g, int n);

/// H_n = Z^{rank H^n} + tors(H^{n+1}); reliable one degree lower than the
/// input (degree 0 is free and always available).
GradedGroups homology_from_integral_cohomology(const GradedGroups& cohomology);

/// H_n(X; G) = H_n (x) G + Tor(H_{n-1}, G).
FgAbGroup homology_with_coefficients(const GradedGroups& homology, const FgAbGroup& g, int n);

/// H^p(X; M) from the integral cohomology groups H^p and H^{p+1}:
/// H^p (x) M + Tor(H^{p+1}, M).
FgAbGroup coefficient_cohomology(const FgAbGroup& hp, const FgAbGroup& hp1, const FgAbGroup& m);

} // namespace emtower
