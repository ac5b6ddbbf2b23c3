//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/fft.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <fftw3.h>

#include "circscale/error.hpp"

namespace circscale {
namespace {
  struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(fftw_alloc_complex(n == 0 ? 1 : n)) { }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer &) = delete;
    FftwBuffer &operator=(const FftwBuffer &) = delete;

    fftw_complex *data;
  };

  // FFTW planning is not thread-safe, execution with new-array interfaces is.
  // Plans are built once per (n_b, s, sign) on fftw-allocated buffers, and
  // every execution also uses fftw-allocated buffers so alignment matches.
  class PlanCache {
  public:
    ~PlanCache() {
      for (auto &[key, plan]: plans_)
        fftw_destroy_plan(plan);
    }

    fftw_plan get(int n_b, int s, int sign) {
      std::lock_guard lock(mu_);
      auto key = std::make_tuple(n_b, s, sign);
      if (auto it = plans_.find(key); it != plans_.end())
        return it->second;

      FftwBuffer in(static_cast<std::size_t>(n_b) * s),
          out(static_cast<std::size_t>(n_b) * s);
      int n[] = { n_b };
      fftw_plan plan =
          fftw_plan_many_dft(1, n, s, in.data, nullptr, s, 1, out.data,
                             nullptr, s, 1, sign, FFTW_ESTIMATE);
      if (plan == nullptr)
        throw InternalConsistencyError("fftw failed to create a plan");
      plans_.emplace(key, plan);
      return plan;
    }

  private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
  };

  PlanCache &plan_cache() {
    static PlanCache cache;
    return cache;
  }

  CVec transform(const CVec &x, Eigen::Index n_b, Eigen::Index s, int sign) {
    if (n_b < 1 || s < 1 || x.size() != n_b * s)
      throw ConfigError("blockwise transform: length must equal n_b * s");

    const auto n = static_cast<std::size_t>(x.size());
    fftw_plan plan =
        plan_cache().get(static_cast<int>(n_b), static_cast<int>(s), sign);

    FftwBuffer in(n), out(n);
    std::memcpy(in.data, x.data(), n * sizeof(fftw_complex));
    fftw_execute_dft(plan, in.data, out.data);

    CVec y(x.size());
    std::memcpy(static_cast<void *>(y.data()), out.data, n * sizeof(fftw_complex));
    y *= 1.0 / std::sqrt(static_cast<double>(n_b));
    return y;
  }
}  // namespace

CVec blockwise_dft(const Eigen::VectorXd &x, Eigen::Index n_b,
                   Eigen::Index s) {
  return transform(x.cast<std::complex<double>>(), n_b, s, FFTW_FORWARD);
}

CVec blockwise_dft(const CVec &x, Eigen::Index n_b, Eigen::Index s) {
  return transform(x, n_b, s, FFTW_FORWARD);
}

CVec blockwise_idft(const CVec &x, Eigen::Index n_b, Eigen::Index s) {
  return transform(x, n_b, s, FFTW_BACKWARD);
}

}  // namespace circscale
