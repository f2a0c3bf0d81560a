#include "hardcore/lattice.hpp"

#include <algorithm>

namespace hardcore {

std::string to_string(const Site& v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")";
}

std::array<Site, 4> neighbours(Site v) noexcept {
  return {Site{v.x - 1, v.y}, Site{v.x + 1, v.y}, Site{v.x, v.y - 1}, Site{v.x, v.y + 1}};
}

LatticeBox::LatticeBox(std::int32_t x_min, std::int32_t y_min, std::int32_t x_max,
                       std::int32_t y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (x_min > x_max || y_min > y_max) {
    throw std::invalid_argument("LatticeBox: empty box");
  }
  if (x_max - x_min + 1 > kMaxBoxSide || y_max - y_min + 1 > kMaxBoxSide) {
    throw std::invalid_argument("LatticeBox: side exceeds " + std::to_string(kMaxBoxSide));
  }
}

LatticeBox LatticeBox::with_size(int width, int height, Site origin) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("LatticeBox: non-positive dimensions");
  }
  return {origin.x, origin.y, origin.x + width - 1, origin.y + height - 1};
}

std::vector<Site> LatticeBox::sites() const {
  std::vector<Site> out;
  out.reserve(size());
  for (auto x = x_min_; x <= x_max_; ++x) {
    for (auto y = y_min_; y <= y_max_; ++y) out.push_back({x, y});
  }
  return out;
}

std::size_t LatticeBox::count(Parity p) const {
  std::size_t n = 0;
  for (auto x = x_min_; x <= x_max_; ++x) {
    for (auto y = y_min_; y <= y_max_; ++y) n += parity({x, y}) == p ? 1 : 0;
  }
  return n;
}

std::string to_string(const LatticeBox& b) {
  return "[" + std::to_string(b.x_min()) + "," + std::to_string(b.x_max()) + "]x[" +
         std::to_string(b.y_min()) + "," + std::to_string(b.y_max()) + "]";
}

LatticeBox box_lambda(int j) {
  if (j < 1) throw std::invalid_argument("box_lambda: j must be >= 1");
  return {-j + 1, -j + 1, j, j};
}

std::vector<Site> external_boundary(const LatticeBox& b) {
  std::vector<Site> out;
  out.reserve(2 * (b.width() + b.height()));
  for (auto y = b.y_min(); y <= b.y_max(); ++y) out.push_back({b.x_min() - 1, y});
  for (auto x = b.x_min(); x <= b.x_max(); ++x) {
    out.push_back({x, b.y_min() - 1});
    out.push_back({x, b.y_max() + 1});
  }
  for (auto y = b.y_min(); y <= b.y_max(); ++y) out.push_back({b.x_max() + 1, y});
  std::sort(out.begin(), out.end());
  return out;
}

Site phi_j(Site v, int j) {
  if (j < 1) throw std::invalid_argument("phi_j: j must be >= 1");
  // box_lambda(j + 1) = [-j, j + 1]^2
  const bool inside = v.x >= -j && v.x <= j + 1 && v.y >= -j && v.y <= j + 1;
  return inside ? v : reflect_theta(v);
}

std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Even: return "even";
    case BoundaryKind::Odd: return "odd";
    case BoundaryKind::Empty: return "free";
    case BoundaryKind::Custom: return "custom";
  }
  return "?";
}

BoundaryKind parse_boundary_kind(const std::string& s) {
  if (s == "even") return BoundaryKind::Even;
  if (s == "odd") return BoundaryKind::Odd;
  if (s == "free" || s == "empty") return BoundaryKind::Empty;
  throw std::invalid_argument("unknown boundary condition '" + s + "' (even|odd|free)");
}

BoundaryCondition BoundaryCondition::of_kind(BoundaryKind k) {
  if (k == BoundaryKind::Custom) {
    throw std::invalid_argument("BoundaryCondition::of_kind: custom needs a site set");
  }
  return BoundaryCondition(k);
}

bool is_independent(const std::vector<Site>& sites) {
  const std::set<Site> s(sites.begin(), sites.end());
  for (const auto& v : s) {
    for (const auto& u : neighbours(v)) {
      if (s.count(u)) return false;
    }
  }
  return true;
}

BoundaryCondition BoundaryCondition::custom(std::set<Site> occupied) {
  if (!is_independent({occupied.begin(), occupied.end()})) {
    throw std::invalid_argument("custom boundary condition is not an independent set");
  }
  BoundaryCondition bc(BoundaryKind::Custom);
  bc.custom_ = std::move(occupied);
  return bc;
}

std::vector<Site> BoundaryCondition::occupied_frame(
    const LatticeBox& box, const std::function<bool(Site)>& present) const {
  std::vector<Site> out;
  if (kind_ == BoundaryKind::Empty) return out;
  for (const auto& v : external_boundary(box)) {
    switch (kind_) {
      case BoundaryKind::Even:
        if (parity(v) == Parity::Even && present(v)) out.push_back(v);
        break;
      case BoundaryKind::Odd:
        if (parity(v) == Parity::Odd && present(v)) out.push_back(v);
        break;
      case BoundaryKind::Custom:
        if (custom_.count(v)) out.push_back(v);
        break;
      case BoundaryKind::Empty:
        break;
    }
  }
  return out;
}

std::vector<Site> BoundaryCondition::occupied_frame(const LatticeBox& box) const {
  return occupied_frame(box, [](Site) { return true; });
}

BoundaryCondition BoundaryCondition::mapped(const std::function<Site(Site)>& f,
                                            bool parity_flip) const {
  switch (kind_) {
    case BoundaryKind::Even: return parity_flip ? odd() : even();
    case BoundaryKind::Odd: return parity_flip ? even() : odd();
    case BoundaryKind::Empty: return empty();
    case BoundaryKind::Custom: {
      std::set<Site> s;
      for (const auto& v : custom_) s.insert(f(v));
      return custom(std::move(s));
    }
  }
  return empty();
}

}  // namespace hardcore
