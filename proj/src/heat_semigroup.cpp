#include "mgc/heat_semigroup.hpp"

#include "mgc/errors.hpp"

#include <cmath>

namespace mgc {

Eigen::VectorXd HeatSemigroup::decay_weights(double t) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(t);
        if (it != cache_.end())
            return it->second;
    }
    Eigen::VectorXd w = (-t * spec_->eigenvalues.array()).exp();
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cache_.emplace(t, w);
    return w;
}

GridFunction HeatSemigroup::apply(const GridFunction& f, double t) const {
    if (t < 0.0)
        throw NonpositiveTime("P_t needs t >= 0");
    if (!f.grid->same_as(grid()))
        throw GridMismatch("function lives on a different grid");
    if (t == 0.0)
        return f;
    Eigen::VectorXd coeff = spec_->eigenvectors.transpose() *
                            spec_->mass.cwiseProduct(f.values);
    coeff.array() *= decay_weights(t).array();
    return GridFunction(*f.grid, spec_->eigenvectors * coeff);
}

GridFunction HeatSemigroup::kernel_column(double t, const GraphPoint& x) const {
    if (!(t > 0.0))
        throw NonpositiveTime("heat kernel needs t > 0");
    Grid::InterpWeights wx = grid().locate(x);
    Eigen::VectorXd ax = (1.0 - wx.w1) * spec_->eigenvectors.row(wx.i0) +
                         wx.w1 * spec_->eigenvectors.row(wx.i1);
    ax.array() *= decay_weights(t).array();
    return GridFunction(grid(), spec_->eigenvectors * ax);
}

double HeatSemigroup::kernel(double t, const GraphPoint& x, const GraphPoint& y) const {
    if (!(t > 0.0))
        throw NonpositiveTime("heat kernel needs t > 0");
    Grid::InterpWeights wx = grid().locate(x);
    Grid::InterpWeights wy = grid().locate(y);
    Eigen::VectorXd ax = (1.0 - wx.w1) * spec_->eigenvectors.row(wx.i0) +
                         wx.w1 * spec_->eigenvectors.row(wx.i1);
    Eigen::VectorXd ay = (1.0 - wy.w1) * spec_->eigenvectors.row(wy.i0) +
                         wy.w1 * spec_->eigenvectors.row(wy.i1);
    return (ax.array() * ay.array() * decay_weights(t).array()).sum();
}

DiscreteMeasure HeatSemigroup::apply_measure(const DiscreteMeasure& mu, double t) const {
    if (t < 0.0)
        throw NonpositiveTime("H_t needs t >= 0");
    if (!mu.grid->same_as(grid()))
        throw GridMismatch("measure lives on a different grid");
    if (t == 0.0)
        return mu;
    DiscreteMeasure out(grid());
    GridFunction f(grid(), mu.density);
    out.density = apply(f, t).values;
    for (const Atom& a : mu.atoms)
        out.density += a.mass * kernel_column(t, a.point).values;
    return out;
}

} // namespace mgc
