#include "atv/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace atv {

double GarchParams::persistence() const {
    double s = 0.0;
    for (double a : arch) s += a;
    for (double b : garch) s += b;
    return s;
}

double GarchParams::unconditional_variance() const {
    return intercept / (1.0 - persistence());
}

std::pair<double, double> VarianceInit::resolve(const SeriesData& series) const {
    switch (mode) {
        case VarianceInitMode::SampleVariance: {
            const double mean_sq = series.x.squaredNorm() / series.size();
            return {mean_sq, mean_sq};
        }
        case VarianceInitMode::FirstObsSquared: {
            const double v = series.x(0) * series.x(0);
            return {v, v};
        }
        case VarianceInitMode::Explicit:
            return {sigma2_0, x2_0};
    }
    return {sigma2_0, x2_0};
}

double logistic_transition(double u, const TransitionParams& params) {
    const double z = params.slope * (u - params.location);
    // Stable branch: only ever exponentiate a nonpositive argument.
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double intercept_g(double u, const AtvGarchSpec& spec) {
    double g = 0.0;
    for (const auto& tr : spec.transitions) {
        g += tr.amplitude * logistic_transition(u, tr);
    }
    return g;
}

bool spec_is_valid(const AtvGarchSpec& spec, int grid_size, double eps, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const auto& g = spec.garch;
    if (!(g.intercept > 0.0)) return fail("alpha_0 must be positive");
    for (double a : g.arch)
        if (!(a >= eps)) return fail("arch coefficient below feasibility floor");
    for (double b : g.garch)
        if (!(b >= eps)) return fail("garch coefficient below feasibility floor");
    if (!(g.persistence() < 1.0)) return fail("sum of arch and garch coefficients must be < 1");

    double prev_c = -1.0;
    for (const auto& tr : spec.transitions) {
        if (!(tr.slope > 0.0)) return fail("transition slope must be positive");
        if (!(tr.location >= 0.0 && tr.location <= 1.0)) return fail("location outside [0,1]");
        if (!(tr.location > prev_c)) return fail("locations must be strictly increasing");
        prev_c = tr.location;
    }
    if (!spec.transitions.empty()) {
        // g is monotone between centers, so grid points plus centers suffice.
        auto check = [&](double u) { return g.intercept + intercept_g(u, spec) > 0.0; };
        for (int i = 0; i <= grid_size; ++i) {
            if (!check(static_cast<double>(i) / grid_size))
                return fail("alpha_0 + g(u) not positive everywhere");
        }
        for (const auto& tr : spec.transitions) {
            if (!check(tr.location)) return fail("alpha_0 + g(u) not positive everywhere");
        }
    }
    return true;
}

Eigen::VectorXd conditional_variance_path(const SeriesData& series,
                                          const AtvGarchSpec& spec,
                                          const VarianceInit& init) {
    const int T = series.size();
    const int p = spec.garch.p();
    const int q = spec.garch.q();
    const auto [s2_0, x2_0] = init.resolve(series);

    Eigen::VectorXd sigma2(T);
    for (int t = 1; t <= T; ++t) {
        double s2 = spec.garch.intercept + intercept_g(series.rescaled_time(t), spec);
        for (int i = 1; i <= p; ++i) {
            const double x2 = (t - i >= 1) ? series.x(t - i - 1) * series.x(t - i - 1) : x2_0;
            s2 += spec.garch.arch[i - 1] * x2;
        }
        for (int j = 1; j <= q; ++j) {
            const double lag = (t - j >= 1) ? sigma2(t - j - 1) : s2_0;
            s2 += spec.garch.garch[j - 1] * lag;
        }
        if (!(s2 > 0.0)) {
            std::ostringstream os;
            os << "sigma^2_" << t << " = " << s2 << " is not positive";
            throw NonPositiveVariance(os.str());
        }
        sigma2(t - 1) = s2;
    }
    return sigma2;
}

namespace {

class InnovationSampler {
public:
    InnovationSampler(const InnovationDist& dist, std::uint64_t seed)
        : dist_(dist), rng_(seed), tdist_(dist.dof) {
        if (dist.kind == InnovationKind::StudentT) {
            t_scale_ = std::sqrt((dist.dof - 2.0) / dist.dof);
        }
    }

    double operator()() {
        if (dist_.kind == InnovationKind::StandardNormal) return normal_(rng_);
        return t_scale_ * tdist_(rng_);
    }

private:
    InnovationDist dist_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> tdist_;
    double t_scale_ = 1.0;
};

} // namespace

SeriesData simulate(const AtvGarchSpec& spec, int T, const InnovationDist& dist,
                    int burn_in, std::uint64_t seed) {
    if (T < 1) throw std::invalid_argument("simulate: T must be >= 1");
    if (burn_in < 0) throw std::invalid_argument("simulate: burn_in must be >= 0");
    if (dist.kind == InnovationKind::StudentT && !(dist.dof > 4.0))
        throw std::invalid_argument("simulate: student-t requires dof > 4");

    const int p = spec.garch.p();
    const int q = spec.garch.q();
    const int max_lag = std::max(p, q);
    const double v0 = spec.garch.unconditional_variance();
    const double g_start = intercept_g(1.0 / T, spec);

    InnovationSampler draw(dist, seed);

    const int total = burn_in + T;
    std::vector<double> x2(total + max_lag, v0);
    std::vector<double> s2(total + max_lag, v0);

    Eigen::VectorXd out(T);
    for (int k = 0; k < total; ++k) {
        const int idx = k + max_lag;
        const int retained_t = k - burn_in + 1; // 1-based once past burn-in
        const double g = (retained_t >= 1)
                             ? intercept_g(static_cast<double>(retained_t) / T, spec)
                             : g_start;
        double sig2 = spec.garch.intercept + g;
        for (int i = 1; i <= p; ++i) sig2 += spec.garch.arch[i - 1] * x2[idx - i];
        for (int j = 1; j <= q; ++j) sig2 += spec.garch.garch[j - 1] * s2[idx - j];
        if (!(sig2 > 0.0)) throw NonPositiveVariance("simulate: sigma^2 not positive");
        const double xt = std::sqrt(sig2) * draw();
        s2[idx] = sig2;
        x2[idx] = xt * xt;
        if (retained_t >= 1) out(retained_t - 1) = xt;
    }
    return SeriesData{std::move(out)};
}

} // namespace atv
