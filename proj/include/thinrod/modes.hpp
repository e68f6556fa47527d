#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "thinrod/assembly.hpp"
#include "thinrod/eigensolve.hpp"
#include "thinrod/errors.hpp"
#include "thinrod/mesh.hpp"

namespace thinrod {

enum class ModeClass { Longitudinal, Transverse, Mixed };

inline std::string to_string(ModeClass c) {
    switch (c) {
    case ModeClass::Longitudinal: return "longitudinal";
    case ModeClass::Transverse: return "transverse";
    case ModeClass::Mixed: return "mixed";
    }
    return "unknown";
}

struct Thresholds {
    double lo = 0.1;
    double hi = 0.5;
};

struct ModeReport {
    double axial_energy = 0.0;      // u^T K_axial u
    double transverse_energy = 0.0; // u^T K_transverse u (eps^-2 included)
    double transverse_fraction = 0.0;
    ModeClass classification = ModeClass::Longitudinal;
    std::vector<double> axial_mass;
    double participation = 0.0;
};

/// (u^T K_axial u, u^T K_transverse u) for an M-normalized vector.
inline std::pair<double, double> energy_split(const EigenPair& p, const SparsePair& sp) {
    if (!sp.has_blocks)
        throw ConfigError("energy_split: stiffness blocks were dropped; re-assemble with "
                          "retain_blocks = true");
    if (p.vector.size() != sp.size()) throw ConfigError("energy_split: vector length mismatch");
    return {p.vector.dot(sp.K_axial * p.vector), p.vector.dot(sp.K_transverse * p.vector)};
}

/// Transverse share of the stiffness energy. Dividing by the block sum rather than lambda
/// makes the two shares add to one exactly; the sum equals lambda up to the residual.
inline double transverse_fraction(const std::pair<double, double>& split) {
    const double total = split.first + split.second;
    if (!(total > 0.0)) return 0.0;
    return std::clamp(split.second / total, 0.0, 1.0);
}

inline void validate(const Thresholds& t) {
    if (!(t.lo > 0.0 && t.lo < t.hi && t.hi < 1.0))
        throw ConfigError("thresholds must satisfy 0 < lo < hi < 1");
}

inline ModeClass classify(double fraction, const Thresholds& t = {}) {
    validate(t);
    if (fraction < t.lo) return ModeClass::Longitudinal;
    if (fraction > t.hi) return ModeClass::Transverse;
    return ModeClass::Mixed;
}

/// Fraction of the M-mass of a mode in each axial segment, elements attributed by centroid,
/// and the participation ratio 1 / sum f_i^2.
inline std::pair<std::vector<double>, double> localization(const EigenPair& p, const HexMesh& mesh,
                                                           const SparsePair& sp,
                                                           const std::vector<double>& cuts) {
    double lo = mesh.nodes.front()[0], hi = lo;
    for (const auto& x : mesh.nodes) {
        lo = std::min(lo, x[0]);
        hi = std::max(hi, x[0]);
    }
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (!(cuts[i] > lo && cuts[i] < hi))
            throw ConfigError("localization: cuts must lie inside (ell0, ell1)");
        if (i > 0 && !(cuts[i] > cuts[i - 1]))
            throw ConfigError("localization: cuts must be strictly increasing");
    }
    const std::vector<double> u = sp.expand(p.vector);
    std::vector<double> mass(cuts.size() + 1, 0.0);
    std::vector<int> count(cuts.size() + 1, 0);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const int cell = static_cast<int>(c);
        const std::size_t seg = static_cast<std::size_t>(
            std::upper_bound(cuts.begin(), cuts.end(), mesh.centroid(cell)[0]) - cuts.begin());
        const Mat8 Me = element_matrices(mesh, cell).mass;
        Eigen::Matrix<double, 8, 1> ue;
        for (int a = 0; a < 8; ++a) ue(a) = u[mesh.cells[c][a]];
        mass[seg] += ue.dot(Me * ue);
        ++count[seg];
    }
    for (std::size_t s = 0; s < count.size(); ++s)
        if (count[s] == 0)
            throw ConfigError("localization: segment " + std::to_string(s) + " holds no elements");
    double total = 0.0;
    for (double m : mass) total += m;
    if (!(total > 0.0)) throw ConfigError("localization: mode has zero mass");
    double sq = 0.0;
    for (double& m : mass) {
        m /= total;
        sq += m * m;
    }
    return {mass, 1.0 / sq};
}

inline ModeReport make_report(const EigenPair& p, const HexMesh& mesh, const SparsePair& sp,
                              const std::vector<double>& cuts, const Thresholds& t = {}) {
    ModeReport r;
    const auto split = energy_split(p, sp);
    r.axial_energy = split.first;
    r.transverse_energy = split.second;
    r.transverse_fraction = transverse_fraction(split);
    r.classification = classify(r.transverse_fraction, t);
    std::tie(r.axial_mass, r.participation) = localization(p, mesh, sp, cuts);
    return r;
}

} // namespace thinrod
