#include "admsched/diagnostics.hpp"

#include "admsched/partition_checks.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <functional>
#include <limits>
#include <map>

namespace admsched {

RegionCounts region_counts(const Configuration& y, const Partition& p)
{
    RegionCounts x(static_cast<std::size_t>(p.K()), 0);
    for (const auto& particle : y.particles())
        ++x[static_cast<std::size_t>(p.region_of(particle.location))];
    return x;
}

namespace {

// Pairwise "guaranteed" relation between two distinct regions.
bool regions_compatible(const Partition& p, const AdmissibilityModel& model, int i, int j)
{
    if (const auto* g = std::get_if<RegionGraph>(&model))
        return !g->adjacent(i, j);
    return min_region_distance(p, i, j) >= std::get<PairwiseDistance>(model).r;
}

double binomial_upper(std::size_t n, int kmax)
{
    double total = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        double c = 1.0;
        for (int i = 0; i < k; ++i)
            c = c * static_cast<double>(n - static_cast<std::size_t>(i)) / (i + 1);
        total += c;
    }
    return total;
}

} // namespace

WValue w_value(std::span<const std::uint64_t> x, const Partition& p, const AdmissibilityModel& model,
               std::uint64_t search_budget)
{
    WValue best;
    std::vector<int> occupied;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] >= 1)
            occupied.push_back(static_cast<int>(k));
    if (occupied.empty())
        return best;

    const int mu = max_admissible_size(model);
    auto consider = [&](const RegionSet& s) {
        double lw = 0.0;
        for (int k : s)
            lw += log_of(x[static_cast<std::size_t>(k)]);
        if (lw > best.log_w || best.argmax.empty()) {
            best.log_w = lw;
            best.argmax = s;
        }
    };

    if (binomial_upper(occupied.size(), mu) <= static_cast<double>(search_budget)) {
        const std::size_t m = occupied.size();
        std::vector<std::vector<char>> compat(m, std::vector<char>(m, 0));
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                compat[a][b] = compat[b][a] = regions_compatible(p, model, occupied[a], occupied[b]);

        RegionSet current;
        std::vector<std::size_t> picked;
        std::function<void(std::size_t)> dfs = [&](std::size_t from) {
            bool extended = false;
            if (static_cast<int>(picked.size()) < mu) {
                for (std::size_t c = from; c < m; ++c) {
                    if (!std::all_of(picked.begin(), picked.end(), [&](std::size_t q) { return compat[q][c] != 0; }))
                        continue;
                    if (!size_allowed(model, picked.size() + 1))
                        continue;
                    picked.push_back(c);
                    current.push_back(occupied[c]);
                    dfs(c + 1);
                    current.pop_back();
                    picked.pop_back();
                    extended = true;
                }
            }
            if (!extended && !current.empty())
                consider(current);
        };
        dfs(0);
        best.exact = true;
        return best;
    }

    best.exact = false;
    for (int k : occupied)
        consider(RegionSet{k});
    for (const auto& block : p.blocks()) {
        RegionSet s;
        for (int k : block)
            if (x[static_cast<std::size_t>(k)] >= 1)
                s.push_back(k);
        if (!s.empty())
            consider(s);
    }
    return best;
}

WValue w_value(const Configuration& y, const Partition& p, const AdmissibilityModel& model)
{
    const auto x = region_counts(y, p);
    return w_value(x, p, model);
}

BigInt omega_size(int K)
{
    return BigInt(1) << K;
}

LoadConstants load_constants(double lambda_beta, int mu, const BigInt& omega)
{
    if (!(lambda_beta < mu))
        throw std::invalid_argument("load constants need lambda*beta < mu");
    LoadConstants c;
    c.eps = 0.5 * (1.0 - lambda_beta / mu);
    c.log_threshold = (2.0 / c.eps) * (std::log(2.0) + log_of(omega) - std::log(c.eps));
    c.overflow = c.log_threshold > std::log(DBL_MAX);
    return c;
}

namespace {

struct GraphTerms {
    BigInt total = 0;
    std::vector<std::pair<std::uint32_t, BigInt>> v; // occupied independent sets with v_S
};

GraphTerms graph_terms(const RegionGraph& g, std::span<const BigInt> x)
{
    if (x.size() != static_cast<std::size_t>(g.K()))
        throw std::invalid_argument("region counts do not match the graph's K");
    GraphTerms t;
    for (std::uint32_t mask : g.independent_sets()) {
        BigInt v = 1;
        for (std::uint32_t m = mask; m != 0; m &= m - 1)
            v *= x[static_cast<std::size_t>(std::countr_zero(m))];
        if (v == 0)
            continue;
        t.total += v;
        t.v.emplace_back(mask, std::move(v));
    }
    return t;
}

double mask_log(std::uint32_t mask, std::span<const BigInt> x)
{
    double s = 0.0;
    for (std::uint32_t m = mask; m != 0; m &= m - 1)
        s += log_of(x[static_cast<std::size_t>(std::countr_zero(m))]);
    return s;
}

} // namespace

LogWeightResult log_weight_check(const RegionGraph& g, std::span<const BigInt> x, double eps)
{
    const auto terms = graph_terms(g, x);
    LogWeightResult r;
    for (const auto& [mask, v] : terms.v) {
        const double lw = mask_log(mask, x);
        r.lhs += to_double(Rational(v, terms.total)) * lw;
        r.log_w = std::max(r.log_w, lw); // every independent occupied set is guaranteed
    }
    r.rhs = (1.0 - eps) * r.log_w;
    r.log_threshold = (2.0 / eps) * (std::log(2.0) + log_of(omega_size(g.K())) - std::log(eps));
    r.in_B = r.log_w >= r.log_threshold;
    r.holds = r.lhs >= r.rhs;
    return r;
}

LogWeightResult log_weight_check(const AdmissibilityModel& model, const Configuration& y, const Partition& p, double eps)
{
    const auto q = q_S_exact(model, y, p);
    const auto x = region_counts(y, p);
    LogWeightResult r;
    for (const auto& [s, qs] : q) {
        double lw = 0.0;
        for (int k : s)
            lw += log_of(x[static_cast<std::size_t>(k)]);
        r.lhs += to_double(qs) * lw;
    }
    r.log_w = w_value(x, p, model).log_w;
    r.rhs = (1.0 - eps) * r.log_w;
    r.log_threshold = (2.0 / eps) * (std::log(2.0) + log_of(omega_size(p.K())) - std::log(eps));
    r.in_B = r.log_w >= r.log_threshold;
    r.holds = r.lhs >= r.rhs;
    return r;
}

std::vector<Rational> graph_region_marginals(const RegionGraph& g, std::span<const BigInt> x)
{
    const auto terms = graph_terms(g, x);
    std::vector<BigInt> touched(static_cast<std::size_t>(g.K()), BigInt(0));
    for (const auto& [mask, v] : terms.v)
        for (std::uint32_t m = mask; m != 0; m &= m - 1)
            touched[static_cast<std::size_t>(std::countr_zero(m))] += v;
    std::vector<Rational> p;
    for (const auto& t : touched)
        p.emplace_back(t, terms.total);
    return p;
}

DriftBoundResult drift_bound_check(const RegionGraph& g, std::span<const BigInt> x, double lambda_beta)
{
    const auto consts = load_constants(lambda_beta, g.mu(), omega_size(g.K()));
    const auto marg = graph_region_marginals(g, x);
    std::vector<double> p;
    for (const auto& q : marg)
        p.push_back(to_double(q));
    DriftBoundResult r;
    r.G = drift_G<BigInt>(x, p, lambda_beta / g.K());
    double sum_log = 0.0;
    for (const auto& xk : x)
        if (xk > 1)
            sum_log += log_of(xk) / g.K();
    r.bound = -consts.eps * g.mu() * sum_log;
    r.in_B = log_weight_check(g, x, consts.eps).in_B;
    r.holds = r.G <= r.bound;
    return r;
}

DriftEstimate empirical_drift(const Configuration& y, const AdmissibilityModel& model, const ArrivalSpec& traffic,
                              const Partition& p, Engine& eng, std::size_t reps)
{
    if (reps == 0)
        throw std::invalid_argument("empirical_drift needs at least one repetition");
    const auto x0 = region_counts(y, p);
    const double v0 = lyapunov_V<std::uint64_t>(x0);
    std::vector<int> region_of_index(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        region_of_index[i] = p.region_of(y[i].location);

    double mean = 0.0, m2 = 0.0;
    RegionCounts x;
    for (std::size_t rep = 1; rep <= reps; ++rep) {
        x = x0;
        for (ParticleId id : sample_admissible_subset(model, y, eng).removed)
            --x[static_cast<std::size_t>(region_of_index[*y.index_of(id)])];
        for (const auto& batch : sample_arrivals(traffic, eng))
            x[static_cast<std::size_t>(p.region_of(batch.location))] += batch.size;
        const double d = lyapunov_V<std::uint64_t>(x) - v0;
        const double delta = d - mean;
        mean += delta / static_cast<double>(rep);
        m2 += delta * (d - mean);
    }
    DriftEstimate out;
    out.mean = mean;
    out.reps = reps;
    out.std_error = reps > 1 ? std::sqrt(m2 / static_cast<double>(reps - 1) / static_cast<double>(reps)) : 0.0;
    return out;
}

double exact_drift(const Configuration& y, const AdmissibilityModel& model, const ArrivalSpec& traffic,
                   const Partition& p, std::uint64_t max_outcomes)
{
    const auto counts = traffic.batch_count.finite_support();
    const auto sizes = traffic.batch_size.finite_support();
    if (!counts || !sizes)
        throw std::invalid_argument("exact_drift needs finite-support batch count and size distributions");

    const auto v = v_S_counts(model, y, p);
    const std::uint64_t K = static_cast<std::uint64_t>(p.K());
    double arrival_outcomes = 0.0;
    for (auto [c, pc] : *counts)
        arrival_outcomes += std::pow(static_cast<double>(K * sizes->size()), static_cast<double>(c));
    if (arrival_outcomes * static_cast<double>(v.size()) > static_cast<double>(max_outcomes))
        throw std::length_error("exact drift would enumerate too many outcomes");

    BigInt total = 0;
    for (const auto& [s, c] : v)
        total += c;

    const auto x0 = region_counts(y, p);
    const double v0 = lyapunov_V<std::uint64_t>(x0);
    double expected = 0.0;
    RegionCounts x;
    for (const auto& [s, c] : v) {
        const double qs = to_double(Rational(c, total));
        x = x0;
        for (int k : s)
            --x[static_cast<std::size_t>(k)];
        const double base = lyapunov_V<std::uint64_t>(x);

        // recursion over batches; only touched regions change V
        double inner = 0.0;
        std::function<void(std::uint64_t, double, double)> place = [&](std::uint64_t left, double prob, double value) {
            if (left == 0) {
                inner += prob * value;
                return;
            }
            for (std::uint64_t k = 0; k < K; ++k) {
                for (auto [size, ps] : *sizes) {
                    const double before = x_log_x(x[k]);
                    x[k] += size;
                    const double after = x_log_x(x[k]);
                    place(left - 1, prob * ps / static_cast<double>(K), value + after - before);
                    x[k] -= size;
                }
            }
        };
        for (auto [c_batches, pc] : *counts)
            place(c_batches, pc, base);
        expected += qs * inner;
    }
    return expected - v0;
}

std::vector<double> per_region_arrival_pmf(const ArrivalSpec& traffic, int K)
{
    const auto sizes = traffic.batch_size.finite_support();
    if (!sizes)
        throw std::invalid_argument("per-region arrival law needs a finite-support batch size");
    std::uint64_t max_size = 0;
    for (auto [s, ps] : *sizes)
        max_size = std::max(max_size, s);

    // one batch landing in the region: mass 1/K spread over the size atoms
    auto convolve = [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> out(a.size() + b.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                out[i + j] += a[i] * b[j];
        return out;
    };
    std::vector<double> size_pmf(max_size + 1, 0.0);
    for (auto [s, ps] : *sizes)
        size_pmf[s] += ps;

    if (const auto counts = traffic.batch_count.finite_support()) {
        std::vector<double> one(max_size + 1, 0.0);
        one[0] = 1.0 - 1.0 / K;
        for (std::size_t s = 0; s <= max_size; ++s)
            one[s] += size_pmf[s] / K;
        std::uint64_t max_count = 0;
        for (auto [c, pc] : *counts)
            max_count = std::max(max_count, c);
        std::vector<double> out(max_count * max_size + 1, 0.0);
        std::vector<double> power{1.0};
        std::map<std::uint64_t, double> by_count(counts->begin(), counts->end());
        for (std::uint64_t c = 0; c <= max_count; ++c) {
            if (auto it = by_count.find(c); it != by_count.end())
                for (std::size_t a = 0; a < power.size(); ++a)
                    out[a] += it->second * power[a];
            power = convolve(power, one);
        }
        return out;
    }

    if (traffic.batch_count.kind() != DiscreteDist::Kind::Poisson)
        throw std::invalid_argument("per-region arrival law supports finite-support or Poisson batch counts");
    // Thinned Poisson: N_k ~ Poisson(lambda/K), compound with the size law.
    const double rate = traffic.batch_count.mean() / K;
    std::vector<double> out{0.0};
    std::vector<double> power{1.0};
    double term = std::exp(-rate), tail = 1.0;
    for (std::uint64_t n = 0; tail > 1e-17 && n < 10'000; ++n) {
        if (n > 0)
            term *= rate / static_cast<double>(n);
        if (out.size() < power.size())
            out.resize(power.size(), 0.0);
        for (std::size_t a = 0; a < power.size(); ++a)
            out[a] += term * power[a];
        tail -= term;
        power = convolve(power, size_pmf);
    }
    return out;
}

DiagnosticsReport diagnose(const Configuration& y, const Partition& p, const AdmissibilityModel& model,
                           const ArrivalSpec& traffic, std::optional<double> g2_sup, std::size_t exact_limit)
{
    DiagnosticsReport d;
    const auto x = region_counts(y, p);
    d.V = lyapunov_V<std::uint64_t>(x);
    d.J = J_value<std::uint64_t>(x);
    d.log_w = w_value(x, p, model).log_w;
    const double lb = traffic.lambda() * traffic.beta();
    const int mu = max_admissible_size(model);
    if (lb < mu) {
        const auto c = load_constants(lb, mu, omega_size(p.K()));
        d.epsilon = c.eps;
        d.log_B_threshold = c.log_threshold;
        d.B_overflow = c.overflow;
    } else {
        d.epsilon = 0.5 * (1.0 - lb / mu);
        d.log_B_threshold = std::numeric_limits<double>::infinity();
        d.B_overflow = true;
    }
    if (y.size() <= exact_limit) {
        const auto marg = removal_marginals(model, y, p);
        std::vector<double> pk;
        for (const auto& q : marg.region)
            pk.push_back(to_double(q));
        d.G = drift_G<std::uint64_t>(x, pk, lb / p.K());
        if (y.size() <= brute_force_limit && d.epsilon > 0.0)
            d.log_weight_lhs = log_weight_check(model, y, p, d.epsilon).lhs;
        if (g2_sup)
            d.in_C = *d.G >= -*g2_sup - 1.0;
    }
    return d;
}

} // namespace admsched
