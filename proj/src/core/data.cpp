#include "ptab/core/data.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptab {

IidDataset::IidDataset(Eigen::MatrixXd x, std::vector<int> a, Eigen::VectorXd y)
    : x_(std::move(x)), a_(std::move(a)), y_(std::move(y)) {
    const auto n = a_.size();
    if (n < 2) {
        throw std::invalid_argument("dataset needs at least 2 records, got " + std::to_string(n));
    }
    if (static_cast<std::size_t>(x_.rows()) != n || static_cast<std::size_t>(y_.size()) != n) {
        throw std::invalid_argument("dataset columns have inconsistent lengths");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (a_[i] != 0 && a_[i] != 1) {
            throw std::invalid_argument("treatment must be 0 or 1 (record " + std::to_string(i) + ")");
        }
    }
    if (!x_.allFinite() || !y_.allFinite()) {
        throw std::invalid_argument("dataset contains non-finite values");
    }
}

IidDataset IidDataset::from_records(std::span<const IidRecord> records) {
    const auto n = records.size();
    const auto p = n == 0 ? 0 : records.front().x.size();
    Eigen::MatrixXd x(n, p);
    std::vector<int> a(n);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (records[i].x.size() != p) {
            throw std::invalid_argument("records have different covariate dimensions");
        }
        for (std::size_t j = 0; j < p; ++j) x(i, j) = records[i].x[j];
        a[i] = records[i].a;
        y[i] = records[i].y;
    }
    return IidDataset(std::move(x), std::move(a), std::move(y));
}

IidRecord IidDataset::record(std::size_t i) const {
    IidRecord r;
    r.x.resize(dim());
    for (std::size_t j = 0; j < dim(); ++j) r.x[j] = x_(i, j);
    r.a = a_.at(i);
    r.y = y_[i];
    return r;
}

IidDataset IidDataset::subset(std::span<const std::size_t> idx) const {
    Eigen::MatrixXd x(idx.size(), x_.cols());
    std::vector<int> a(idx.size());
    Eigen::VectorXd y(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        x.row(k) = x_.row(idx[k]);
        a[k] = a_[idx[k]];
        y[k] = y_[idx[k]];
    }
    return IidDataset(std::move(x), std::move(a), std::move(y));
}

std::size_t IidDataset::count_arm(int arm) const noexcept {
    std::size_t c = 0;
    for (int v : a_) c += (v == arm);
    return c;
}

PanelDataset::PanelDataset(std::vector<Trajectory> days) : days_(std::move(days)) {
    if (days_.empty()) {
        throw std::invalid_argument("panel needs at least one day");
    }
    horizon_ = days_.front().horizon();
    dim_ = static_cast<std::size_t>(days_.front().x.cols());
    if (horizon_ == 0) {
        throw std::invalid_argument("panel horizon must be positive");
    }
    for (std::size_t i = 0; i < days_.size(); ++i) {
        const auto& d = days_[i];
        if (d.horizon() != horizon_ || static_cast<std::size_t>(d.y.size()) != horizon_ ||
            static_cast<std::size_t>(d.x.rows()) != horizon_ ||
            static_cast<std::size_t>(d.x.cols()) != dim_) {
            throw std::invalid_argument("day " + std::to_string(i) + " has inconsistent shape");
        }
        for (int v : d.a) {
            if (v != 0 && v != 1) {
                throw std::invalid_argument("treatment must be 0 or 1 (day " + std::to_string(i) + ")");
            }
        }
        if (!d.x.allFinite() || !d.y.allFinite()) {
            throw std::invalid_argument("day " + std::to_string(i) + " contains non-finite values");
        }
    }
}

PanelDataset PanelDataset::subset(std::span<const std::size_t> idx) const {
    std::vector<Trajectory> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(days_.at(i));
    return PanelDataset(std::move(out));
}

Eigen::MatrixXd PanelDataset::states_at(std::size_t t) const {
    Eigen::MatrixXd out(days_.size(), dim_);
    for (std::size_t i = 0; i < days_.size(); ++i) out.row(i) = days_[i].x.row(t);
    return out;
}

}  // namespace ptab
