#pragma once

#include "mgc/measure.hpp"

#include <vector>

namespace mgc {

/// Edgewise nodal samples of a quantity that lives on the disjoint union of
/// edges rather than on the quotient graph: a vertex may carry a different
/// value for each incident edge.
struct EdgeFunction {
    const Grid* grid = nullptr;
    std::vector<Eigen::VectorXd> per_edge;

    explicit EdgeFunction(const Grid& g) : grid(&g) {
        per_edge.reserve(g.graph().edge_count());
        for (int e = 0; e < g.graph().edge_count(); ++e)
            per_edge.emplace_back(Eigen::VectorXd::Zero(g.nodes_on_edge(e)));
    }

    double max_abs() const;
};

/// Nodal derivative samples per edge: centered differences at interior nodes,
/// one-sided at edge endpoints.
EdgeFunction gradient(const GridFunction& f);

/// Gamma(f,g) = grad f . grad g, edgewise. Throws GridMismatch.
EdgeFunction gamma(const GridFunction& f, const GridFunction& g);
EdgeFunction gamma(const GridFunction& f);

/// Pointwise combination of two edge functions.
EdgeFunction product(const EdgeFunction& a, const EdgeFunction& b);
EdgeFunction sqrt(const EdgeFunction& a);

/// Collapses an edge function to a grid function; at shared vertex nodes the
/// incident values are averaged with the trapezoidal weights, which is the
/// L^2 pairing used when applying P_t to a function defined edgewise.
GridFunction to_grid_function(const EdgeFunction& a);

/// Trapezoidal quadrature over the disjoint union of edges.
double integrate(const EdgeFunction& a);

/// Dirichlet energy of the piecewise-linear interpolant, a quadratic form in
/// the nodal values. cheeger_energy is half of it.
double dirichlet_energy(const GridFunction& f);
double cheeger_energy(const GridFunction& f);

/// Logarithmic entropy w.r.t. Lebesgue measure; +infinity when the measure
/// has an atomic part. 0*log(0) = 0.
double entropy(const DiscreteMeasure& mu);

/// Regularized entropy: integral of log(f + delta) d mu. Throws AtomicMeasure.
double entropy_delta(const DiscreteMeasure& mu, double delta);

struct FisherOptions {
    double density_floor = 1e-12; // f below this counts as zero
    double gradient_floor = 1e-8; // |grad f| above this on a zero set -> infinity
};

/// Fisher information: quadrature of psi(f, grad f) with the three-branch
/// integrand |v|^2/u, 0 at (0,0), +infinity when the density vanishes under a
/// nonzero gradient. The infinite value is returned in-band.
double fisher_information(const DiscreteMeasure& mu, const FisherOptions& opt = {});

struct LipschitzConstants {
    Eigen::VectorXd local; // per node, max adjacent difference quotient
    double global = 0.0;   // sup over sampled pairs of |f(x)-f(y)| / d(x,y)
};

LipschitzConstants lipschitz_constants(const GridFunction& f);

/// Record of the basic functionals of a density measure.
struct Functionals {
    double dirichlet = 0.0;
    double entropy = 0.0;
    double fisher = 0.0;
};

Functionals evaluate_functionals(const DiscreteMeasure& mu);

} // namespace mgc
