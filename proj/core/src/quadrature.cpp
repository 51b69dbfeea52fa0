#include "tristable/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace tristable {

namespace {

GaussLegendreRule build_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 0 ? 1.0 : p1;
            const double pn1 = p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            const double step = pn / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        if (n == 1) {
            x = 0.0;
            dp = 1.0;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n == 1) rule.weights[0] = 2.0;
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidParameter, "Gauss-Legendre order must be positive");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussLegendreRule>(build_rule(n));
    return *slot;
}

}  // namespace tristable
