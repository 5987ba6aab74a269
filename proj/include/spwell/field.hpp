#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spwell/grid.hpp"

namespace spwell {

/// Real-valued samples on a grid. Value semantics; immutable grids are shared.
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid, double fill = 0.0)
        : grid_(std::move(grid)), v_(grid_->node_count(), fill) {}
    Field(GridPtr grid, std::vector<double> values)
        : grid_(std::move(grid)), v_(std::move(values)) {
        if (v_.size() != grid_->node_count())
            throw std::invalid_argument("Field: value count must equal grid node count");
    }

    static Field sample(GridPtr grid, const std::function<double(const Point&)>& f) {
        Field out(grid);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = grid->active(i) ? f(grid->coords(i)) : 0.0;
        return out;
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return v_.size(); }

    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    bool finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (grid_->active(i)) m = std::max(m, std::abs(v_[i]));
        return m;
    }
    double min_value() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (grid_->active(i)) m = std::min(m, v_[i]);
        return m;
    }

    Field& operator+=(const Field& o) { bin(o, [](double& a, double b) { a += b; }); return *this; }
    Field& operator-=(const Field& o) { bin(o, [](double& a, double b) { a -= b; }); return *this; }
    Field& operator*=(double c) { for (double& x : v_) x *= c; return *this; }

    friend Field operator+(Field a, const Field& b) { a += b; return a; }
    friend Field operator-(Field a, const Field& b) { a -= b; return a; }
    friend Field operator*(double c, Field a) { a *= c; return a; }

    /// Zero out values outside the grid's Dirichlet dof set.
    void enforce_boundary() {
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (!grid_->dof(i)) v_[i] = 0.0;
    }

private:
    template <class F>
    void bin(const Field& o, F f) {
        if (!grid_ || !o.grid_ || !grid_->same(*o.grid_))
            throw std::invalid_argument("Field: grid mismatch");
        for (std::size_t i = 0; i < v_.size(); ++i) f(v_[i], o.v_[i]);
    }

    GridPtr grid_;
    std::vector<double> v_;
};

} // namespace spwell
