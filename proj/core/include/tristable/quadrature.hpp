#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "tristable/error.hpp"

namespace tristable {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule; thread-safe. Throws InvalidParameter for n < 1.
const GaussLegendreRule& gauss_legendre(int n);

struct QuadratureOptions {
    int order = 32;
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    int max_intervals = 4096;
};

template <std::size_t N>
struct QuadratureResult {
    std::array<double, N> value{};
    std::array<double, N> error{};
    int intervals = 0;
};

namespace detail {

template <std::size_t N, class F>
std::array<double, N> apply_rule(const GaussLegendreRule& rule, F& f, double a, double b) {
    std::array<double, N> sum{};
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const std::array<double, N> fx = f(mid + half * rule.nodes[k]);
        for (std::size_t i = 0; i < N; ++i) sum[i] += rule.weights[k] * fx[i];
    }
    for (auto& s : sum) s *= half;
    return sum;
}

}  // namespace detail

/// Globally adaptive Gauss-Legendre quadrature of a vector-valued integrand.
///
/// Each interval is estimated with the base rule on both halves; the error
/// indicator is the difference from the whole-interval estimate. The interval
/// with the largest indicator is bisected until every component satisfies
/// err_i <= max(abs_tol, rel_tol * |I_i|). Throws QuadratureFailure when the
/// interval budget is exhausted.
template <std::size_t N, class F>
QuadratureResult<N> integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    const GaussLegendreRule& rule = gauss_legendre(opts.order);
    struct Piece {
        double a, b;
        std::array<double, N> value, error, left, right;
        double worst;
    };
    auto estimate = [&](double lo, double hi, const std::array<double, N>& coarse) {
        const double mid = 0.5 * (lo + hi);
        Piece piece{lo, hi, {}, {}, detail::apply_rule<N>(rule, f, lo, mid),
                    detail::apply_rule<N>(rule, f, mid, hi), 0.0};
        for (std::size_t i = 0; i < N; ++i) {
            piece.value[i] = piece.left[i] + piece.right[i];
            piece.error[i] = std::abs(piece.value[i] - coarse[i]);
            piece.worst = std::max(piece.worst, piece.error[i]);
        }
        return piece;
    };
    auto by_error = [](const Piece& x, const Piece& y) { return x.worst < y.worst; };

    QuadratureResult<N> result;
    if (a == b) return result;

    std::vector<Piece> heap;
    heap.push_back(estimate(a, b, detail::apply_rule<N>(rule, f, a, b)));
    while (true) {
        std::array<double, N> total{}, err{};
        for (const auto& piece : heap) {
            for (std::size_t i = 0; i < N; ++i) {
                total[i] += piece.value[i];
                err[i] += piece.error[i];
            }
        }
        bool converged = true;
        for (std::size_t i = 0; i < N; ++i) {
            if (!(err[i] <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total[i])))) converged = false;
        }
        if (converged || static_cast<int>(heap.size()) >= opts.max_intervals) {
            result.value = total;
            result.error = err;
            result.intervals = static_cast<int>(heap.size());
            if (!converged) {
                std::ostringstream os;
                os << "adaptive quadrature on [" << a << ", " << b << "] exhausted " << opts.max_intervals
                   << " intervals";
                throw Error(ErrorCode::QuadratureFailure, os.str());
            }
            return result;
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Piece worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Cannot be bisected in floating point; accept its estimate.
            Piece frozen = worst;
            frozen.error.fill(0.0);
            frozen.worst = 0.0;
            heap.push_back(frozen);
            std::push_heap(heap.begin(), heap.end(), by_error);
            continue;
        }
        heap.push_back(estimate(worst.a, mid, worst.left));
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(estimate(mid, worst.b, worst.right));
        std::push_heap(heap.begin(), heap.end(), by_error);
    }
}

template <class F>
double integrate_adaptive_scalar(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    auto wrapped = [&](double x) { return std::array<double, 1>{f(x)}; };
    return integrate_adaptive<1>(wrapped, a, b, opts).value[0];
}

/// Fixed-order Gauss-Legendre over [a, b].
template <class F>
double integrate_fixed(F&& f, double a, double b, int order) {
    const GaussLegendreRule& rule = gauss_legendre(order);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return half * sum;
}

}  // namespace tristable
