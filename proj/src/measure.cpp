#include "mgc/measure.hpp"

#include "mgc/errors.hpp"

#include <cmath>

namespace mgc {

bool DiscreteMeasure::has_atoms() const {
    for (const Atom& a : atoms)
        if (a.mass > 0.0)
            return true;
    return false;
}

double DiscreteMeasure::atomic_mass() const {
    double m = 0.0;
    for (const Atom& a : atoms)
        m += a.mass;
    return m;
}

void DiscreteMeasure::normalize() {
    double m = total_mass();
    if (!(m > 0.0))
        throw MassMismatch("cannot normalize a measure with zero mass");
    density /= m;
    for (Atom& a : atoms)
        a.mass /= m;
}

DiscreteMeasure uniform_measure(const Grid& grid) {
    DiscreteMeasure mu(grid);
    mu.density.setConstant(1.0 / grid.graph().total_length());
    return mu;
}

DiscreteMeasure dirac(const Grid& grid, const GraphPoint& p, double mass) {
    grid.graph().check_point(p);
    DiscreteMeasure mu(grid);
    mu.atoms.push_back({p, mass});
    return mu;
}

DiscreteMeasure dirac_at_vertex(const Grid& grid, int v, double mass) {
    return dirac(grid, grid.graph().vertex_point(v), mass);
}

DiscreteMeasure measure_from_density(const GridFunction& f) {
    DiscreteMeasure mu(*f.grid);
    if ((f.values.array() < 0.0).any())
        throw std::invalid_argument("density must be nonnegative");
    mu.density = f.values;
    return mu;
}

std::vector<Atom> support_points(const DiscreteMeasure& mu, double drop_tol) {
    std::vector<Atom> pts;
    const Grid& g = *mu.grid;
    for (int i = 0; i < g.node_count(); ++i) {
        double m = g.lumped()[i] * mu.density[i];
        if (m > drop_tol)
            pts.push_back({g.node_point(i), m});
    }
    for (const Atom& a : mu.atoms)
        if (a.mass > drop_tol)
            pts.push_back(a);
    return pts;
}

DiscreteMeasure linear_combination(double a, const DiscreteMeasure& mu, double b,
                                   const DiscreteMeasure& nu) {
    if (!mu.grid->same_as(*nu.grid))
        throw GridMismatch("linear_combination requires a common grid");
    DiscreteMeasure out(*mu.grid);
    out.density = a * mu.density + b * nu.density;
    for (const Atom& at : mu.atoms)
        out.atoms.push_back({at.point, a * at.mass});
    for (const Atom& at : nu.atoms)
        out.atoms.push_back({at.point, b * at.mass});
    return out;
}

} // namespace mgc
