#ifndef HARDCORE_LATTICE_HPP
#define HARDCORE_LATTICE_HPP

// Geometry of finite boxes in Z^2: parity, external boundaries, the
// reflection across x = 1/2 and its annulus-preserving variant, and the
// boundary conditions clamped on a box's external frame.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardcore {

enum class Parity { Even, Odd };

struct Site {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend constexpr auto operator<=>(const Site&, const Site&) = default;
};

std::string to_string(const Site& v);

constexpr Parity parity(Site v) noexcept {
  // ((x + y) mod 2) using a non-negative remainder.
  return ((static_cast<std::int64_t>(v.x) + v.y) & 1) == 0 ? Parity::Even : Parity::Odd;
}

constexpr Parity opposite(Parity p) noexcept {
  return p == Parity::Even ? Parity::Odd : Parity::Even;
}

constexpr Site translate(Site v, Site a) noexcept { return {v.x + a.x, v.y + a.y}; }

/// Reflection across the vertical line x = 1/2.
constexpr Site reflect_theta(Site v) noexcept { return {1 - v.x, v.y}; }

/// The four lattice neighbours of v (left, right, down, up).
std::array<Site, 4> neighbours(Site v) noexcept;

constexpr bool adjacent(Site a, Site b) noexcept {
  const auto dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const auto dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx + dy == 1;
}

/// Maximum side length of any box.
inline constexpr int kMaxBoxSide = 64;

/// Rectangular region [x_min, x_max] x [y_min, y_max], bounds inclusive.
class LatticeBox {
 public:
  LatticeBox(std::int32_t x_min, std::int32_t y_min, std::int32_t x_max, std::int32_t y_max);

  /// Box of the given width and height with lower-left corner at `origin`.
  static LatticeBox with_size(int width, int height, Site origin = {0, 0});

  std::int32_t x_min() const noexcept { return x_min_; }
  std::int32_t x_max() const noexcept { return x_max_; }
  std::int32_t y_min() const noexcept { return y_min_; }
  std::int32_t y_max() const noexcept { return y_max_; }
  int width() const noexcept { return x_max_ - x_min_ + 1; }
  int height() const noexcept { return y_max_ - y_min_ + 1; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height());
  }

  bool contains(Site v) const noexcept {
    return v.x >= x_min_ && v.x <= x_max_ && v.y >= y_min_ && v.y <= y_max_;
  }
  bool contains(const LatticeBox& other) const noexcept {
    return other.x_min_ >= x_min_ && other.x_max_ <= x_max_ && other.y_min_ >= y_min_ &&
           other.y_max_ <= y_max_;
  }

  /// Position of v in lexicographic (x-major, then y) order. v must be inside.
  std::size_t index_of(Site v) const noexcept {
    return static_cast<std::size_t>(v.x - x_min_) * static_cast<std::size_t>(height()) +
           static_cast<std::size_t>(v.y - y_min_);
  }
  Site site_at(std::size_t index) const noexcept {
    const auto h = static_cast<std::size_t>(height());
    return {x_min_ + static_cast<std::int32_t>(index / h),
            y_min_ + static_cast<std::int32_t>(index % h)};
  }

  /// All sites in lexicographic order.
  std::vector<Site> sites() const;

  std::size_t count(Parity p) const;

  /// True when reflect_theta maps the box onto itself.
  bool theta_symmetric() const noexcept { return x_min_ + x_max_ == 1; }

  LatticeBox translated(Site a) const noexcept {
    return {x_min_ + a.x, y_min_ + a.y, x_max_ + a.x, y_max_ + a.y};
  }

  friend bool operator==(const LatticeBox&, const LatticeBox&) = default;

 private:
  std::int32_t x_min_, y_min_, x_max_, y_max_;
};

std::string to_string(const LatticeBox& b);

/// The centred box [-j+1, j]^2 of side 2j.
LatticeBox box_lambda(int j);

/// Sites at L1 distance one from the box that are not in it, in lexicographic order.
std::vector<Site> external_boundary(const LatticeBox& b);

/// Identity on box_lambda(j + 1), reflect_theta elsewhere.
Site phi_j(Site v, int j);

enum class BoundaryKind { Even, Odd, Empty, Custom };

std::string to_string(BoundaryKind k);
BoundaryKind parse_boundary_kind(const std::string& s);

/// Occupation pattern clamped on the external frame of a box. Only the trace on
/// the frame matters for the hard-core model; custom sites off the frame are ignored.
class BoundaryCondition {
 public:
  BoundaryCondition() = default;

  static BoundaryCondition even() { return BoundaryCondition(BoundaryKind::Even); }
  static BoundaryCondition odd() { return BoundaryCondition(BoundaryKind::Odd); }
  static BoundaryCondition empty() { return BoundaryCondition(BoundaryKind::Empty); }
  static BoundaryCondition of_kind(BoundaryKind k);
  /// Throws std::invalid_argument if two of the sites are adjacent.
  static BoundaryCondition custom(std::set<Site> occupied);

  BoundaryKind kind() const noexcept { return kind_; }
  const std::set<Site>& custom_occupied() const noexcept { return custom_; }

  /// Occupied frame sites of `box`. `present(v)` reports whether frame site v
  /// is available (not deleted); Even/Odd frames skip unavailable sites.
  std::vector<Site> occupied_frame(const LatticeBox& box,
                                   const std::function<bool(Site)>& present) const;
  std::vector<Site> occupied_frame(const LatticeBox& box) const;

  /// Image under a site map (used for reflected and translated boundaries).
  /// Even/Odd kinds are remapped by `parity_flip`; Custom sites are mapped pointwise.
  BoundaryCondition mapped(const std::function<Site(Site)>& f, bool parity_flip) const;

 private:
  explicit BoundaryCondition(BoundaryKind k) : kind_(k) {}

  BoundaryKind kind_ = BoundaryKind::Empty;
  std::set<Site> custom_;
};

/// True if no two sites in the list are adjacent.
bool is_independent(const std::vector<Site>& sites);

}  // namespace hardcore

#endif  // HARDCORE_LATTICE_HPP
