#pragma once

#include "mgc/grid.hpp"

#include <utility>
#include <vector>

namespace mgc {

struct Atom {
    GraphPoint point;
    double mass = 0.0;
};

/// Nonnegative measure on the graph: an absolutely continuous part given by
/// nodal density values (piecewise linear w.r.t. edge Lebesgue measure, with
/// nodal masses lumped(i) * density(i)) plus optional point atoms. Atoms at
/// vertices are the measure's singular part at the vertex set.
struct DiscreteMeasure {
    const Grid* grid = nullptr;
    Eigen::VectorXd density;
    std::vector<Atom> atoms;

    DiscreteMeasure() = default;
    explicit DiscreteMeasure(const Grid& g)
        : grid(&g), density(Eigen::VectorXd::Zero(g.node_count())) {}

    bool has_atoms() const;
    double atomic_mass() const;
    double density_mass() const { return grid->lumped().dot(density); }
    double total_mass() const { return density_mass() + atomic_mass(); }

    /// Scales the measure so that total mass is one.
    void normalize();
};

DiscreteMeasure uniform_measure(const Grid& grid);
DiscreteMeasure dirac(const Grid& grid, const GraphPoint& p, double mass = 1.0);
DiscreteMeasure dirac_at_vertex(const Grid& grid, int v, double mass = 1.0);

/// Density measure from nodal values; negative entries are rejected.
DiscreteMeasure measure_from_density(const GridFunction& f);

/// Support of the measure as weighted points: nodal masses at node locations
/// plus the atoms. Entries with zero mass are dropped.
std::vector<Atom> support_points(const DiscreteMeasure& mu, double drop_tol = 0.0);

/// a*mu + b*nu on a common grid (exact linear combination of densities and
/// concatenated atoms).
DiscreteMeasure linear_combination(double a, const DiscreteMeasure& mu, double b,
                                   const DiscreteMeasure& nu);

} // namespace mgc
