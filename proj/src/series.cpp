#include "rearr/series.hpp"

#include <cmath>
#include <stdexcept>

#include "rearr/compensated.hpp"

namespace rearr {

SeriesSource alternating_harmonic() {
    SeriesSource s;
    s.name = "alternating_harmonic";
    s.term = [](std::uint64_t m) {
        double v = 1.0 / static_cast<double>(m);
        return (m % 2 == 1) ? v : -v;
    };
    s.pattern = SignPattern::OddPositive;
    return s;
}

SeriesSource alternating_rsqrt() {
    SeriesSource s;
    s.name = "alternating_rsqrt";
    s.term = [](std::uint64_t m) {
        double v = 1.0 / std::sqrt(static_cast<double>(m));
        return (m % 2 == 1) ? v : -v;
    };
    s.pattern = SignPattern::OddPositive;
    return s;
}

SeriesSource inverse_square() {
    SeriesSource s;
    s.name = "inverse_square";
    s.term = [](std::uint64_t m) {
        double d = static_cast<double>(m);
        return 1.0 / (d * d);
    };
    s.pattern = SignPattern::AllPositive;
    return s;
}

SeriesSource inline_series(std::vector<double> terms, std::string name) {
    SeriesSource s;
    s.name = std::move(name);
    auto data = std::make_shared<std::vector<double>>(std::move(terms));
    s.length = data->size();
    s.term = [data](std::uint64_t m) {
        if (m == 0 || m > data->size()) throw std::out_of_range("inline series: index beyond end");
        return (*data)[m - 1];
    };
    s.pattern = SignPattern::Generic;
    return s;
}

SeriesSource source_by_name(const std::string& name) {
    if (name == "alternating_harmonic") return alternating_harmonic();
    if (name == "alternating_rsqrt") return alternating_rsqrt();
    if (name == "inverse_square") return inverse_square();
    throw std::invalid_argument("unknown series source: " + name);
}

WitnessResult witness_convergability(const SeriesSource& source, std::uint64_t horizon, double bound) {
    if (horizon < 1) throw std::invalid_argument("witness_convergability: horizon must be >= 1");
    if (!(bound > 0)) throw std::invalid_argument("witness_convergability: bound must be > 0");

    std::uint64_t end = horizon;
    if (source.length && *source.length < end) end = *source.length;

    CompensatedSum pos, neg;
    std::uint64_t tail_start = horizon - horizon / 10 + 1;  // last decile
    double max_tail = 0.0;
    for (std::uint64_t m = 1; m <= end; ++m) {
        double a = source.term(m);
        if (a >= 0)
            pos += a;
        else
            neg += a;
        if (m >= tail_start) {
            double mag = std::fabs(a);
            if (mag > max_tail) max_tail = mag;
        }
    }

    WitnessResult r;
    r.scanned.horizon = horizon;
    r.scanned.pos_sum = pos.value();
    r.scanned.neg_sum = neg.value();
    r.scanned.max_tail_term = max_tail;

    if (!(r.scanned.pos_sum >= bound)) r.failed.push_back(WitnessCondition::PosDivergence);
    if (!(r.scanned.neg_sum <= -bound)) r.failed.push_back(WitnessCondition::NegDivergence);
    if (!(max_tail <= 1.0 / bound)) r.failed.push_back(WitnessCondition::TailDecay);
    if (r.failed.empty()) r.witness = r.scanned;
    return r;
}

} // namespace rearr
