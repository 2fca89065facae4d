#include "gbx/context.hpp"

#include <set>

namespace gbx {

void GradedContext::finish() {
    if (base_.empty()) throw Error(ErrorCode::TypeError, "context needs at least one base coordinate");
    if (fiber_.empty()) throw Error(ErrorCode::TypeError, "context needs at least one fiber coordinate");
    if (fiber_.size() > 16) throw Error(ErrorCode::Unsupported, "rank above 16 is not supported");
    std::set<std::string> seen;
    auto claim = [&](const std::string& s) {
        if (s.empty()) throw Error(ErrorCode::TypeError, "empty coordinate name");
        if (!seen.insert(s).second) throw Error(ErrorCode::TypeError, "duplicate name '" + s + "'");
    };
    for (const auto& s : base_) claim(s);
    for (const auto& s : fiber_) claim(s);
    for (const auto& s : params_) claim(s);
    space_.names = base_;
    space_.names.insert(space_.names.end(), params_.begin(), params_.end());
    space_.signs.assign(space_.names.size(), 0);
    for (const auto& c : chart_) {
        int i = space_.index_of(c.coord);
        if (i < 0) throw Error(ErrorCode::UnknownCoordinate, "chart names unknown coordinate '" + c.coord + "'");
        if (c.sign != 1 && c.sign != -1) throw Error(ErrorCode::TypeError, "chart sign must be +1 or -1");
        space_.signs[i] = c.sign;
    }
}

ContextPtr GradedContext::make(std::vector<std::string> base, std::vector<std::string> fiber,
                               std::vector<ChartEntry> chart, std::vector<std::string> params) {
    std::shared_ptr<GradedContext> c(new GradedContext());
    c->base_ = std::move(base);
    c->fiber_ = std::move(fiber);
    c->chart_ = std::move(chart);
    c->params_ = std::move(params);
    c->finish();
    return c;
}

ContextPtr GradedContext::tangent(std::vector<std::string> base, std::vector<ChartEntry> chart,
                                  std::vector<std::string> params) {
    std::vector<std::string> fiber;
    for (const auto& b : base) fiber.push_back("d" + b);
    std::shared_ptr<GradedContext> c(new GradedContext());
    c->base_ = std::move(base);
    c->fiber_ = std::move(fiber);
    c->chart_ = std::move(chart);
    c->params_ = std::move(params);
    c->tangent_ = true;
    c->finish();
    return c;
}

ContextPtr GradedContext::cotangent(const std::vector<std::string>& q, std::vector<ChartEntry> chart,
                                    std::vector<std::string> params) {
    std::vector<std::string> base = q;
    for (const auto& s : q) {
        if (s.empty() || s[0] != 'q')
            throw Error(ErrorCode::TypeError, "cotangent coordinates must start with 'q': '" + s + "'");
        base.push_back("p" + s.substr(1));
    }
    return tangent(std::move(base), std::move(chart), std::move(params));
}

int GradedContext::base_index(const std::string& name) const {
    for (int i = 0; i < n(); ++i)
        if (base_[i] == name) return i;
    return -1;
}

int GradedContext::fiber_index(const std::string& name) const {
    for (int a = 0; a < r(); ++a)
        if (fiber_[a] == name) return a;
    return -1;
}

int GradedContext::param_index(const std::string& name) const {
    for (std::size_t k = 0; k < params_.size(); ++k)
        if (params_[k] == name) return n() + static_cast<int>(k);
    return -1;
}

bool GradedContext::same_as(const GradedContext& o) const {
    if (this == &o) return true;
    if (base_ != o.base_ || fiber_ != o.fiber_ || params_ != o.params_) return false;
    return space_.signs == o.space_.signs;
}

std::string GradedContext::chart_string() const {
    std::string s;
    for (const auto& c : chart_) {
        if (!s.empty()) s += ", ";
        s += c.coord + (c.sign > 0 ? ">0" : "<0");
    }
    return s;
}

} // namespace gbx
