#include "rfk/numerics.hpp"

namespace rfk::numerics {

std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidInput("cumulative_trapezoid: size mismatch");
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return out;
}

double simpson_uniform(std::span<const double> y, double step) {
    const std::size_t n = y.size();
    if (n < 3 || n % 2 == 0) throw InvalidInput("simpson_uniform needs an odd sample count >= 3");
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) (i % 2 == 1 ? odd : even) += y[i];
    return step / 3.0 * (y.front() + y.back() + 4.0 * odd + 2.0 * even);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
    out.back() = b;
    return out;
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.empty()) throw InvalidInput("PiecewiseLinear: bad knot arrays");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (x_[i] < x_[i - 1]) throw InvalidInput("PiecewiseLinear: knots must be nondecreasing");
}

double PiecewiseLinear::operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - x_.begin());
    const std::size_t i = j - 1;
    const double dx = x_[j] - x_[i];
    if (dx <= 0.0) return y_[j];
    const double w = (t - x_[i]) / dx;
    return y_[i] + w * (y_[j] - y_[i]);
}

double PiecewiseLinear::inverse(double target) const {
    const bool increasing = y_.back() >= y_.front();
    const std::size_t n = y_.size();
    if (increasing) {
        if (target <= y_.front()) return x_.front();
        if (target >= y_.back()) return x_.back();
        const auto it = std::lower_bound(y_.begin(), y_.end(), target);
        const std::size_t j = static_cast<std::size_t>(it - y_.begin());
        if (y_[j] == target) return x_[j];
        const std::size_t i = j - 1;
        const double w = (target - y_[i]) / (y_[j] - y_[i]);
        return x_[i] + w * (x_[j] - x_[i]);
    }
    if (target >= y_.front()) return x_.front();
    if (target <= y_.back()) return x_.back();
    const auto it = std::lower_bound(y_.begin(), y_.end(), target, [](double a, double b) { return a > b; });
    std::size_t j = static_cast<std::size_t>(it - y_.begin());
    if (j >= n) j = n - 1;
    if (y_[j] == target) return x_[j];
    const std::size_t i = j - 1;
    const double w = (target - y_[i]) / (y_[j] - y_[i]);
    return x_[i] + w * (x_[j] - x_[i]);
}

} // namespace rfk::numerics
