#pragma once

namespace rearr {

// Neumaier variant of Kahan summation: tracks a running compensation term so
// that long alternating sums don't lose the small tail contributions.
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double v) : sum_(v) {}

    CompensatedSum& operator+=(double v) {
        double t = sum_ + v;
        if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
        return *this;
    }

    double value() const { return sum_ + comp_; }
    void reset() { sum_ = 0.0; comp_ = 0.0; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace rearr
