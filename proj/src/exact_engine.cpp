#include "hardcore/exact_engine.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "hardcore/rng.hpp"

namespace hardcore {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::shared_ptr<const MaskTable> build_table(int height) {
  auto t = std::make_shared<MaskTable>();
  t->height = height;
  const std::uint32_t limit = std::uint32_t{1} << height;
  for (std::uint32_t m = 0; m < limit; ++m) {
    if ((m & (m >> 1)) == 0) t->masks.push_back(m);
  }
  return t;
}

std::shared_ptr<const MaskTable> checked_table(const LatticeBox& box, const ActivityField& f) {
  if (!f.region().contains(box)) {
    throw std::invalid_argument("exact engine: box " + to_string(box) +
                                " not inside field region " + to_string(f.region()));
  }
  if (box.height() > kMaxTransferHeight) {
    throw CapacityError("exact engine: box height " + std::to_string(box.height()) +
                        " exceeds cap " + std::to_string(kMaxTransferHeight));
  }
  return mask_table(box.height());
}

// In-place sum over subsets: d[s] <- sum_{t subset of s} d[t].
void subset_sum(std::vector<double>& d, int height) {
  const std::size_t n = d.size();
  for (int b = 0; b < height; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t s = 0; s < n; ++s) {
      if (s & bit) d[s] += d[s ^ bit];
    }
  }
}

// Column-by-column weights and transfer vectors for one (box, field, bc).
class Transfer {
 public:
  Transfer(const LatticeBox& box, const ActivityField& f, const BoundaryCondition& bc)
      : box_(box),
        width_(box.width()),
        height_(box.height()),
        table_(checked_table(box, f)),
        full_((std::uint32_t{1} << box.height()) - 1) {
    // Sites adjacent to an occupied frame site are blocked.
    std::vector<std::uint32_t> allowed(width_, full_);
    const auto frame = bc.occupied_frame(box, [&f](Site v) { return f.present(v); });
    for (const auto& u : frame) {
      for (const auto& v : neighbours(u)) {
        if (box.contains(v)) {
          allowed[v.x - box.x_min()] &= ~(std::uint32_t{1} << (v.y - box.y_min()));
        }
      }
    }

    const auto& masks = table_->masks;
    log_weight_.assign(width_, std::vector<double>(masks.size()));
    std::vector<double> log_act(height_);
    for (int c = 0; c < width_; ++c) {
      for (int r = 0; r < height_; ++r) {
        const double a = f.activity({box.x_min() + c, box.y_min() + r});
        if (a > 0.0) {
          log_act[r] = std::log(a);
        } else {
          log_act[r] = kNegInf;
          allowed[c] &= ~(std::uint32_t{1} << r);
        }
      }
      auto& lw = log_weight_[c];
      for (std::size_t i = 0; i < masks.size(); ++i) {
        const std::uint32_t m = masks[i];
        if ((m & ~allowed[c]) != 0) {
          lw[i] = kNegInf;
          continue;
        }
        double s = 0.0;
        for (std::uint32_t bits = m; bits != 0; bits &= bits - 1) {
          s += log_act[std::countr_zero(bits)];
        }
        lw[i] = s;
      }
    }
  }

  // Forward vectors fwd_[c][i] proportional to the total weight of columns
  // 0..c with column c in state i; log_scale_ accumulates the normalisation.
  void forward() {
    const auto& masks = table_->masks;
    const std::size_t n = masks.size();
    fwd_.assign(width_, std::vector<double>(n));
    log_scale_ = 0.0;
    std::vector<double> dense(std::size_t{full_} + 1);
    for (int c = 0; c < width_; ++c) {
      const auto& lw = log_weight_[c];
      const double shift = *std::max_element(lw.begin(), lw.end());
      auto& cur = fwd_[c];
      if (c == 0) {
        for (std::size_t i = 0; i < n; ++i) cur[i] = std::exp(lw[i] - shift);
      } else {
        std::fill(dense.begin(), dense.end(), 0.0);
        const auto& prev = fwd_[c - 1];
        for (std::size_t i = 0; i < n; ++i) dense[masks[i]] = prev[i];
        subset_sum(dense, height_);
        for (std::size_t i = 0; i < n; ++i) {
          cur[i] = std::exp(lw[i] - shift) * dense[full_ & ~masks[i]];
        }
      }
      log_scale_ += shift + normalise(cur);
    }
  }

  // Backward vectors bwd_[c][i] proportional to the total weight of columns
  // c+1..W-1 given column c in state i.
  void backward() {
    const auto& masks = table_->masks;
    const std::size_t n = masks.size();
    bwd_.assign(width_, std::vector<double>(n, 1.0));
    std::vector<double> dense(std::size_t{full_} + 1);
    for (int c = width_ - 2; c >= 0; --c) {
      const auto& lw = log_weight_[c + 1];
      const double shift = *std::max_element(lw.begin(), lw.end());
      std::fill(dense.begin(), dense.end(), 0.0);
      const auto& next = bwd_[c + 1];
      for (std::size_t i = 0; i < n; ++i) dense[masks[i]] = std::exp(lw[i] - shift) * next[i];
      subset_sum(dense, height_);
      auto& cur = bwd_[c];
      for (std::size_t i = 0; i < n; ++i) cur[i] = dense[full_ & ~masks[i]];
      normalise(cur);
    }
  }

  LogPartitionResult result() const {
    double total = 0.0;
    for (double v : fwd_.back()) total += v;
    if (total <= 0.0) return {kNegInf, true};
    return {log_scale_ + std::log(total), false};
  }

  std::vector<double> site_marginals() const {
    const auto& masks = table_->masks;
    std::vector<double> p(box_.size(), 0.0);
    std::vector<double> occ(height_);
    for (int c = 0; c < width_; ++c) {
      std::fill(occ.begin(), occ.end(), 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < masks.size(); ++i) {
        const double w = fwd_[c][i] * bwd_[c][i];
        if (w == 0.0) continue;
        total += w;
        for (std::uint32_t bits = masks[i]; bits != 0; bits &= bits - 1) {
          occ[std::countr_zero(bits)] += w;
        }
      }
      for (int r = 0; r < height_; ++r) {
        p[static_cast<std::size_t>(c) * height_ + r] = total > 0.0 ? occ[r] / total : 0.0;
      }
    }
    return p;
  }

  // Last column from its forward vector, then each earlier column conditioned
  // on the one to its right.
  std::vector<Site> sample(CounterRng& rng) const {
    const auto& masks = table_->masks;
    std::vector<std::uint32_t> chosen(width_);
    std::uint32_t right = 0;
    for (int c = width_ - 1; c >= 0; --c) {
      const auto& v = fwd_[c];
      double total = 0.0;
      for (std::size_t i = 0; i < masks.size(); ++i) {
        if ((masks[i] & right) == 0) total += v[i];
      }
      const double target = rng.uniform() * total;
      double acc = 0.0;
      std::size_t pick = 0;  // the empty mask is always compatible
      for (std::size_t i = 0; i < masks.size(); ++i) {
        if ((masks[i] & right) != 0 || v[i] == 0.0) continue;
        acc += v[i];
        pick = i;
        if (acc > target) break;
      }
      chosen[c] = masks[pick];
      right = masks[pick];
    }
    std::vector<Site> out;
    for (int c = 0; c < width_; ++c) {
      for (std::uint32_t bits = chosen[c]; bits != 0; bits &= bits - 1) {
        out.push_back({box_.x_min() + c, box_.y_min() + std::countr_zero(bits)});
      }
    }
    return out;
  }

 private:
  // Divides v by its maximum and returns the log of that maximum.
  static double normalise(std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (m <= 0.0) return 0.0;
    for (double& x : v) x /= m;
    return std::log(m);
  }

  LatticeBox box_;
  int width_;
  int height_;
  std::shared_ptr<const MaskTable> table_;
  std::uint32_t full_;
  std::vector<std::vector<double>> log_weight_;
  std::vector<std::vector<double>> fwd_;
  std::vector<std::vector<double>> bwd_;
  double log_scale_ = 0.0;
};

}  // namespace

std::shared_ptr<const MaskTable> mask_table(int height) {
  if (height < 1 || height > kMaxTransferHeight) {
    throw CapacityError("mask_table: height " + std::to_string(height) + " out of range");
  }
  static std::mutex mutex;
  static std::array<std::shared_ptr<const MaskTable>, kMaxTransferHeight + 1> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[height];
  if (!slot) slot = build_table(height);
  return slot;
}

LogPartitionResult log_partition(const LatticeBox& box, const ActivityField& f,
                                 const BoundaryCondition& bc) {
  Transfer t(box, f, bc);
  t.forward();
  return t.result();
}

MarginalTable marginals(const LatticeBox& box, const ActivityField& f,
                        const BoundaryCondition& bc) {
  Transfer t(box, f, bc);
  t.forward();
  t.backward();
  return {box, t.site_marginals()};
}

double occupation_probability(const LatticeBox& box, const ActivityField& f,
                              const BoundaryCondition& bc, Site v) {
  if (!box.contains(v)) {
    throw std::invalid_argument("occupation_probability: site " + to_string(v) +
                                " outside box");
  }
  return marginals(box, f, bc).at(v);
}

double log_local_expectation(const LatticeBox& box_L, const LatticeBox& inner,
                             const ActivityField& f, const BoundaryCondition& bc) {
  if (!box_L.contains(inner) || !f.region().contains(box_L)) {
    throw std::invalid_argument("local_expectation: need inner within box within field region");
  }
  const auto with_field = log_partition(box_L, f, bc);
  const auto switched = log_partition(box_L, switch_off_inside(f, inner), bc);
  return with_field.log_z - switched.log_z;
}

double local_expectation(const LatticeBox& box_L, const LatticeBox& inner,
                         const ActivityField& f, const BoundaryCondition& bc) {
  return std::exp(log_local_expectation(box_L, inner, f, bc));
}

struct ExactSampler::Impl {
  Transfer transfer;
};

ExactSampler::ExactSampler(const LatticeBox& box, const ActivityField& f,
                           const BoundaryCondition& bc)
    : impl_(std::make_unique<Impl>(Impl{Transfer(box, f, bc)})) {
  impl_->transfer.forward();
}

ExactSampler::~ExactSampler() = default;
ExactSampler::ExactSampler(ExactSampler&&) noexcept = default;
ExactSampler& ExactSampler::operator=(ExactSampler&&) noexcept = default;

std::vector<Site> ExactSampler::draw(ReplicaSeed seed) const {
  CounterRng rng(hash_key({seed.master_seed, seed.replica_index, 0x73616d706c65ULL}));
  return impl_->transfer.sample(rng);
}

std::vector<Site> sample_exact(const LatticeBox& box, const ActivityField& f,
                               const BoundaryCondition& bc, ReplicaSeed seed) {
  return ExactSampler(box, f, bc).draw(seed);
}

}  // namespace hardcore
