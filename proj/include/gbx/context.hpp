// Coordinates (x, xi, p, theta) of the graded symplectic manifold
// attached to a vector bundle of rank r over an n-dimensional base.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbx/scalar.hpp"

namespace gbx {

class GradedContext;
using ContextPtr = std::shared_ptr<const GradedContext>;

class GradedContext {
public:
    struct ChartEntry {
        std::string coord;
        int sign;  // +1 or -1
    };

    // General bundle: base coordinates and fiber coordinates named freely;
    // theta_a prints as '@' + fiber name.
    static ContextPtr make(std::vector<std::string> base, std::vector<std::string> fiber,
                           std::vector<ChartEntry> chart = {}, std::vector<std::string> params = {});
    // Tangent bundle of the base: fiber 'd' + x, theta '@' + x.
    static ContextPtr tangent(std::vector<std::string> base, std::vector<ChartEntry> chart = {},
                              std::vector<std::string> params = {});
    // Tangent bundle of T*M for M with coordinates q: base (q..., p...) where
    // each p name replaces the leading 'q' by 'p'.
    static ContextPtr cotangent(const std::vector<std::string>& q, std::vector<ChartEntry> chart = {},
                                std::vector<std::string> params = {});

    int n() const { return static_cast<int>(base_.size()); }
    int r() const { return static_cast<int>(fiber_.size()); }
    bool is_tangent() const { return tangent_; }

    const std::vector<std::string>& base() const { return base_; }
    const std::vector<std::string>& fiber() const { return fiber_; }
    const std::vector<std::string>& params() const { return params_; }
    const std::vector<ChartEntry>& chart() const { return chart_; }
    const ScalarSpace& space() const { return space_; }

    std::string theta_name(int a) const { return "@" + fiber_[a]; }
    std::string momentum_name(int i) const { return "P[" + base_[i] + "]"; }

    int base_index(const std::string& name) const;   // -1 when absent
    int fiber_index(const std::string& name) const;  // -1 when absent
    int param_index(const std::string& name) const;  // scalar-space index or -1

    // Structural identity (names, chart, params).
    bool same_as(const GradedContext& o) const;

    // "q1>0, p1<0" style description of the chart.
    std::string chart_string() const;

private:
    GradedContext() = default;
    void finish();

    std::vector<std::string> base_, fiber_, params_;
    std::vector<ChartEntry> chart_;
    ScalarSpace space_;
    bool tangent_ = false;
};

} // namespace gbx
