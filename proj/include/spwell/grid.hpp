#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spwell {

enum class GridKind { radial, box3d };

using Point = std::array<double, 3>;

/// Discrete domain approximating the ball B_k.
///
/// Two kinds:
///  - radial: nodes r_i = i·h on [0,k], h = k/(n-1), for radially symmetric
///    wells. Quadrature integrates against 4πr² dr; interior weights are the
///    midpoint rule in r (superconvergent for fields that decay before r=k),
///    the r=0 and r=k nodes carry their half-cell volumes so every weight is
///    positive and the weight sum telescopes to |B_k| up to the end cells.
///  - box3d: uniform Cartesian cube [-k,k]³ with h = 2k/(n-1) per axis and a
///    ball mask: nodes with |x| < k are active, everything else is a
///    Dirichlet-zero ghost layer.
///
/// The gradient lives on faces: dirichlet_form(u,v) = Σ_faces A_f h (δu)(δv)/h²
/// with fields read as 0 outside the Dirichlet set. The Laplacian is the flux
/// difference divided by the node weight, so ∫(-Δu)v = ∫∇u·∇v holds to
/// roundoff by construction (summation by parts). At r=0 this reproduces the
/// symmetric 3u''(0) limit.
class Grid {
public:
    static std::shared_ptr<const Grid> radial(double k, int n) {
        return std::shared_ptr<const Grid>(new Grid(GridKind::radial, k, n));
    }
    static std::shared_ptr<const Grid> box3d(double k, int n) {
        return std::shared_ptr<const Grid>(new Grid(GridKind::box3d, k, n));
    }

    GridKind kind() const { return kind_; }
    double k() const { return k_; }
    int n() const { return n_; }
    double h() const { return h_; }

    /// Number of stored nodes (radial: n; box3d: n³ including masked nodes).
    std::size_t node_count() const { return weights_.size(); }

    /// Quadrature weight per node; strictly positive for every stored node.
    const std::vector<double>& weights() const { return weights_; }

    /// Nodes that participate in integrals (box3d: inside the ball mask).
    bool active(std::size_t i) const {
        return kind_ == GridKind::radial ? true : mask_[i] != 0;
    }
    /// Nodes carrying PDE unknowns (radial: all but r=k; box3d: the mask).
    bool dof(std::size_t i) const {
        return kind_ == GridKind::radial ? i + 1 < node_count() : mask_[i] != 0;
    }
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    std::size_t active_count() const { return active_count_; }

    double radius(std::size_t i) const { return static_cast<double>(i) * h_; }

    Point coords(std::size_t i) const {
        if (kind_ == GridKind::radial) return {radius(i), 0.0, 0.0};
        const std::size_t nn = static_cast<std::size_t>(n_);
        const std::size_t iz = i % nn, iy = (i / nn) % nn, ix = i / (nn * nn);
        return {-k_ + ix * h_, -k_ + iy * h_, -k_ + iz * h_};
    }

    std::size_t index(int ix, int iy, int iz) const {
        const std::size_t nn = static_cast<std::size_t>(n_);
        return (static_cast<std::size_t>(ix) * nn + iy) * nn + iz;
    }

    /// Volume of B_k.
    double ball_volume() const {
        return 4.0 * std::numbers::pi / 3.0 * k_ * k_ * k_;
    }

    /// Stiffness form  Σ_faces A_f (u_a-u_b)(v_a-v_b)/h  with Dirichlet reads
    /// (values outside the dof set count as 0). Equals ∫∇u·∇v for fields in
    /// the discrete H¹₀ space; for general fields it is the form of the
    /// zero-extension.
    double dirichlet_form(const std::vector<double>& u, const std::vector<double>& v,
                          const std::vector<std::uint8_t>* sub = nullptr) const {
        check_size(u); check_size(v);
        double acc = 0.0;
        if (kind_ == GridKind::radial) {
            for (int i = 0; i + 1 < n_; ++i) {
                const double du = read(u, i + 1, sub) - read(u, i, sub);
                const double dv = read(v, i + 1, sub) - read(v, i, sub);
                acc += face_area_[i] * du * dv;
            }
            return acc / h_;
        }
        const int n = n_;
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz) {
                    const std::size_t a = index(ix, iy, iz);
                    // faces in +x, +y, +z direction only (each face once)
                    if (ix + 1 < n) acc += face_term(u, v, a, index(ix + 1, iy, iz), sub);
                    if (iy + 1 < n) acc += face_term(u, v, a, index(ix, iy + 1, iz), sub);
                    if (iz + 1 < n) acc += face_term(u, v, a, index(ix, iy, iz + 1), sub);
                }
        return acc * h_;
    }

    /// Face sum restricted to faces whose BOTH endpoints are dof nodes:
    /// the gradient energy of a field truncated to the grid, with no
    /// Dirichlet closure at the boundary (used by the Sobolev estimates).
    double interior_grad_form(const std::vector<double>& u, const std::vector<double>& v) const {
        check_size(u); check_size(v);
        double acc = 0.0;
        if (kind_ == GridKind::radial) {
            for (int i = 0; i + 2 < n_; ++i)
                acc += face_area_[i] * (u[i + 1] - u[i]) * (v[i + 1] - v[i]);
            return acc / h_;
        }
        const int n = n_;
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz) {
                    const std::size_t a = index(ix, iy, iz);
                    if (!dof(a)) continue;
                    const std::size_t bx = ix + 1 < n ? index(ix + 1, iy, iz) : a;
                    const std::size_t by = iy + 1 < n ? index(ix, iy + 1, iz) : a;
                    const std::size_t bz = iz + 1 < n ? index(ix, iy, iz + 1) : a;
                    if (bx != a && dof(bx)) acc += (u[bx] - u[a]) * (v[bx] - v[a]);
                    if (by != a && dof(by)) acc += (u[by] - u[a]) * (v[by] - v[a]);
                    if (bz != a && dof(bz)) acc += (u[bz] - u[a]) * (v[bz] - v[a]);
                }
        return acc * h_;
    }

    /// Stiffness matrix action: out_i = Σ_faces A_f (u_i - u_nbr)/h for dof
    /// nodes, 0 elsewhere. ⟨Au, v⟩ = dirichlet_form(u, v) for masked reads.
    void apply_stiffness(const std::vector<double>& u, std::vector<double>& out,
                         const std::vector<std::uint8_t>* sub = nullptr) const {
        check_size(u);
        out.assign(node_count(), 0.0);
        if (kind_ == GridKind::radial) {
            for (int i = 0; i + 1 < n_; ++i) {
                if (sub && !(*sub)[i]) continue;
                double acc = face_area_[i] * (read(u, i, sub) - read(u, i + 1, sub));
                if (i > 0) acc += face_area_[i - 1] * (read(u, i, sub) - read(u, i - 1, sub));
                out[i] = acc / h_;
            }
            return;
        }
        const int n = n_;
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz) {
                    const std::size_t a = index(ix, iy, iz);
                    if (!is_dof(a, sub)) continue;
                    const double ua = u[a];
                    double acc = 0.0;
                    acc += ua - (ix > 0 ? read(u, index(ix - 1, iy, iz), sub) : 0.0);
                    acc += ua - (ix + 1 < n ? read(u, index(ix + 1, iy, iz), sub) : 0.0);
                    acc += ua - (iy > 0 ? read(u, index(ix, iy - 1, iz), sub) : 0.0);
                    acc += ua - (iy + 1 < n ? read(u, index(ix, iy + 1, iz), sub) : 0.0);
                    acc += ua - (iz > 0 ? read(u, index(ix, iy, iz - 1), sub) : 0.0);
                    acc += ua - (iz + 1 < n ? read(u, index(ix, iy, iz + 1), sub) : 0.0);
                    out[a] = acc * h_;
                }
    }

    /// Discrete Laplacian: Δu = -(stiffness u)/w on dof nodes, 0 elsewhere.
    void laplacian(const std::vector<double>& u, std::vector<double>& out,
                   const std::vector<std::uint8_t>* sub = nullptr) const {
        apply_stiffness(u, out, sub);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = is_dof(i, sub) ? -out[i] / weights_[i] : 0.0;
    }

    /// Radial face area 4π r_{i+1/2}²; face i sits between nodes i and i+1.
    double face_area(int i) const { return face_area_[i]; }

    bool same(const Grid& other) const {
        return kind_ == other.kind_ && k_ == other.k_ && n_ == other.n_;
    }

private:
    Grid(GridKind kind, double k, int n) : kind_(kind), k_(k), n_(n) {
        if (!(k > 0.0)) throw std::invalid_argument("Grid: radius k must be positive");
        if (n < 3) throw std::invalid_argument("Grid: need at least 3 nodes per axis");
        const double pi = std::numbers::pi;
        if (kind == GridKind::radial) {
            h_ = k / (n - 1);
            weights_.resize(n);
            weights_[0] = 4.0 * pi / 3.0 * std::pow(h_ / 2.0, 3);
            for (int i = 1; i < n - 1; ++i) {
                const double r = i * h_;
                weights_[i] = 4.0 * pi * r * r * h_;
            }
            weights_[n - 1] = 4.0 * pi / 3.0 * (k * k * k - std::pow(k - h_ / 2.0, 3));
            face_area_.resize(n - 1);
            for (int i = 0; i + 1 < n; ++i) {
                const double rf = (i + 0.5) * h_;
                face_area_[i] = 4.0 * pi * rf * rf;
            }
            active_count_ = static_cast<std::size_t>(n);
        } else {
            h_ = 2.0 * k / (n - 1);
            const std::size_t total = static_cast<std::size_t>(n) * n * n;
            weights_.assign(total, h_ * h_ * h_);
            mask_.assign(total, 0);
            active_count_ = 0;
            for (std::size_t i = 0; i < total; ++i) {
                const Point x = coords(i);
                if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < k * k) {
                    mask_[i] = 1;
                    ++active_count_;
                }
            }
        }
    }

    bool is_dof(std::size_t i, const std::vector<std::uint8_t>* sub) const {
        if (!dof(i)) return false;
        return !sub || (*sub)[i];
    }
    double read(const std::vector<double>& u, std::size_t i,
                const std::vector<std::uint8_t>* sub) const {
        return is_dof(i, sub) ? u[i] : 0.0;
    }
    double face_term(const std::vector<double>& u, const std::vector<double>& v,
                     std::size_t a, std::size_t b, const std::vector<std::uint8_t>* sub) const {
        const bool da = is_dof(a, sub), db = is_dof(b, sub);
        if (!da && !db) return 0.0;
        const double du = (db ? u[b] : 0.0) - (da ? u[a] : 0.0);
        const double dv = (db ? v[b] : 0.0) - (da ? v[a] : 0.0);
        return du * dv;
    }
    void check_size(const std::vector<double>& u) const {
        if (u.size() != node_count())
            throw std::invalid_argument("Grid: field size does not match node count");
    }

    GridKind kind_;
    double k_;
    int n_;
    double h_ = 0.0;
    std::vector<double> weights_;
    std::vector<double> face_area_; // radial only
    std::vector<std::uint8_t> mask_; // box3d only
    std::size_t active_count_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

} // namespace spwell
