// SPDX-License-Identifier: Apache-2.0
//
// satsched - user scheduling and power allocation for precoded multi-beam
// satellite downlinks
// Copyright (C) 2026 the satsched contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SATSCHED_PRECODING_HPP
#define SATSCHED_PRECODING_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "satsched/channel.hpp"

namespace satsched {

class SingularMatrixError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Linear precoder for one scheduled set. Columns are unit-norm beamforming
// directions; `normalization` keeps the trace-normalization scalar of the
// unnormalized solution for diagnostics.
struct PrecodingMatrix {
    Eigen::MatrixXcd w; // M x K
    double normalization = 0;
    std::vector<int> column_user_ids;
    double gram_condition = 1.0; // cheap estimate from the Cholesky factor
    bool condition_warning = false;
};

// Effective link power gains z(k, j) = |h_k^H w_j|^2 plus the noise floor.
struct LinkGains {
    Eigen::MatrixXd z; // K x K, non-negative
    double noise_w = 0;
    std::vector<int> user_ids;

    Eigen::Index size() const { return z.rows(); }

    Eigen::Index index_of(int user_id) const {
        for (std::size_t i = 0; i < user_ids.size(); ++i)
            if (user_ids[i] == user_id)
                return static_cast<Eigen::Index>(i);
        throw std::out_of_range("LinkGains: user " + std::to_string(user_id) + " not scheduled");
    }
};

// Scheduled set and its per-user transmit powers for one slot.
struct SlotAllocation {
    std::vector<int> scheduled_ids;
    std::vector<double> powers_w;

    double power_of(int user_id) const {
        for (std::size_t i = 0; i < scheduled_ids.size(); ++i)
            if (scheduled_ids[i] == user_id)
                return powers_w[i];
        throw std::out_of_range("SlotAllocation: user " + std::to_string(user_id) +
                                " not scheduled");
    }

    double total_power() const {
        double s = 0;
        for (double p : powers_w)
            s += p;
        return s;
    }
};

namespace detail {

// condition estimate (lower bound) from the Cholesky factor's diagonal
inline double llt_condition_estimate(const Eigen::MatrixXcd &l) {
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double d = std::abs(l(i, i));
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmin <= 0)
        return std::numeric_limits<double>::infinity();
    const double r = dmax / dmin;
    return r * r;
}

inline PrecodingMatrix normalize_columns(Eigen::MatrixXcd raw, const ChannelMatrix &h,
                                         double cond) {
    PrecodingMatrix out;
    out.normalization = raw.squaredNorm(); // trace(H G^-2 H^H)
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        const double n = raw.col(j).norm();
        if (n <= 0)
            throw SingularMatrixError("precoder column collapsed to zero");
        raw.col(j) /= n;
    }
    out.w = std::move(raw);
    out.column_user_ids = h.column_user_ids;
    out.gram_condition = cond;
    out.condition_warning = cond > 1e12;
    return out;
}

} // namespace detail

// Regularized zero forcing W = H (H^H H + (sigma^2 K / P_max) I)^-1, solved
// through a Cholesky factorization of the regularized Gram matrix, then
// renormalized column by column so that every ||w_k|| = 1 and the power
// budget applies to the p_k alone.
inline PrecodingMatrix rzf_precoder(const ChannelMatrix &h, double p_max, double noise_w) {
    const Eigen::Index k = h.users();
    if (k > h.beams())
        throw std::invalid_argument("rzf_precoder: more users than beams (" +
                                    std::to_string(k) + " > " + std::to_string(h.beams()) + ")");
    if (p_max <= 0 || noise_w <= 0)
        throw std::domain_error("rzf_precoder: P_max and noise must be positive");
    Eigen::MatrixXcd gram = h.h.adjoint() * h.h;
    gram.diagonal().array() += noise_w * static_cast<double>(k) / p_max;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SingularMatrixError("rzf_precoder: regularized Gram matrix not positive definite");
    const double cond = detail::llt_condition_estimate(llt.matrixL());
    Eigen::MatrixXcd raw = llt.solve(h.h.adjoint()).adjoint(); // H G^-1
    return detail::normalize_columns(std::move(raw), h, cond);
}

// Matched-filter columns h_k / ||h_k||.
inline PrecodingMatrix mrt_precoder(const ChannelMatrix &h) {
    PrecodingMatrix out;
    out.w = h.h;
    for (Eigen::Index j = 0; j < out.w.cols(); ++j) {
        const double n = out.w.col(j).norm();
        if (n <= 0)
            throw SingularMatrixError("mrt_precoder: zero channel column");
        out.w.col(j) /= n;
    }
    out.normalization = static_cast<double>(out.w.cols());
    out.column_user_ids = h.column_user_ids;
    return out;
}

// Zero forcing W = H (H^H H)^-1, unit-normalized; requires full column rank.
inline PrecodingMatrix zf_precoder(const ChannelMatrix &h) {
    const Eigen::Index k = h.users();
    if (k > h.beams())
        throw std::invalid_argument("zf_precoder: more users than beams");
    const Eigen::MatrixXcd gram = h.h.adjoint() * h.h;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SingularMatrixError("zf_precoder: rank-deficient channel matrix");
    const double cond = detail::llt_condition_estimate(llt.matrixL());
    Eigen::MatrixXcd raw = llt.solve(h.h.adjoint()).adjoint();
    return detail::normalize_columns(std::move(raw), h, cond);
}

inline LinkGains link_gains(const ChannelMatrix &h, const PrecodingMatrix &w, double noise_w) {
    LinkGains g;
    const Eigen::MatrixXcd cross = h.h.adjoint() * w.w; // (k, j) = h_k^H w_j
    g.z = cross.cwiseAbs2();
    g.noise_w = noise_w;
    g.user_ids = h.column_user_ids;
    return g;
}

// SINR_k = p_k z_kk / (sum_{j != k} p_j z_kj + sigma^2)
inline double sinr(int user_id, const LinkGains &gains, const SlotAllocation &alloc) {
    if (std::find(alloc.scheduled_ids.begin(), alloc.scheduled_ids.end(), user_id) ==
        alloc.scheduled_ids.end())
        throw std::out_of_range("sinr: user not in the slot allocation");
    const Eigen::Index k = gains.index_of(user_id);
    double interference = gains.noise_w;
    double signal = 0;
    for (std::size_t j = 0; j < alloc.scheduled_ids.size(); ++j) {
        const Eigen::Index idx = gains.index_of(alloc.scheduled_ids[j]);
        if (idx == k)
            signal = alloc.powers_w[j] * gains.z(k, idx);
        else
            interference += alloc.powers_w[j] * gains.z(k, idx);
    }
    return signal / interference;
}

// Shannon throughput B log2(1 + SINR) in Mbps for B in MHz.
inline double instantaneous_throughput_mbps(int user_id, const LinkGains &gains,
                                            const SlotAllocation &alloc, double bandwidth_mhz) {
    return bandwidth_mhz * std::log2(1.0 + sinr(user_id, gains, alloc));
}

} // namespace satsched

#endif
