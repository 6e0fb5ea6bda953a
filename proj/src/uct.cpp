#include "emtower/uct.hpp"

#include "emtower/errors.hpp"

#include <fmt/format.h>

namespace emtower {

FgAbGroup GradedGroups::at(int degree) const {
    if (degree < 0) return FgAbGroup::trivial();
    if (degree > reliable_up_to || degree >= int(entries.size()))
        throw EngineError(ErrorCode::DegreeOutOfRange,
                          fmt::format("degree {} exceeds reliability bound {}", degree, reliable_up_to));
    return entries[degree];
}

FgAbGroup cohomology_with_coefficients(const GradedGroups& homology, const FgAbGroup& g, int n) {
    if (n < 0 || n > homology.reliable_up_to)
        throw EngineError(ErrorCode::DegreeOutOfRange,
                          fmt::format("cohomology in degree {} needs homology reliable to {}, have {}", n, n,
                                      homology.reliable_up_to));
    return direct_sum(ext(homology.at(n - 1), g), hom(homology.at(n), g));
}

GradedGroups homology_from_integral_cohomology(const GradedGroups& cohomology) {
    GradedGroups out;
    int top = cohomology.reliable_up_to;
    if (top < 0) return out;
    if (top == 0) {
        out.entries.push_back(FgAbGroup::free(cohomology.at(0).free_rank()));
        out.reliable_up_to = 0;
        return out;
    }
    for (int n = 0; n < top; ++n)
        out.entries.push_back(
            direct_sum(FgAbGroup::free(cohomology.at(n).free_rank()), cohomology.at(n + 1).torsion_part()));
    out.reliable_up_to = top - 1;
    return out;
}

FgAbGroup homology_with_coefficients(const GradedGroups& homology, const FgAbGroup& g, int n) {
    if (n < 0 || n > homology.reliable_up_to)
        throw EngineError(ErrorCode::DegreeOutOfRange,
                          fmt::format("homology in degree {} exceeds reliability bound {}", n,
                                      homology.reliable_up_to));
    return direct_sum(tensor(homology.at(n), g), tor(homology.at(n - 1), g));
}

FgAbGroup coefficient_cohomology(const FgAbGroup& hp, const FgAbGroup& hp1, const FgAbGroup& m) {
    // Same value as Ext(H_{p-1}, M) + Hom(H_p, M) with H_{p-1}, H_p read
    // off from H^p and H^{p+1}.
    return direct_sum(tensor(hp, m), tor(hp1, m));
}

} // namespace emtower
