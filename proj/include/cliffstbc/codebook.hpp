#pragma once

// A design together with one signal set per variable group. Codewords are
// indexed in mixed radix with group 0 varying fastest.

#include "cliffstbc/design.hpp"
#include "cliffstbc/signal_sets.hpp"

namespace cliffstbc {

class StbcCodebook {
public:
    StbcCodebook(LinearSpaceTimeDesign design, std::vector<SignalSet> sets)
        : design_(std::move(design)), sets_(std::move(sets)) {
        validate_shape(design_);
        if (sets_.size() != design_.partition.size()) throw std::invalid_argument("codebook: need one signal set per group");
        size_ = 1;
        for (std::size_t g = 0; g < sets_.size(); ++g) {
            if (sets_[g].dim != static_cast<int>(design_.partition[g].size()))
                throw std::invalid_argument("codebook: signal set " + std::to_string(g + 1) + " has the wrong dimension");
            if (sets_[g].points.empty()) throw std::invalid_argument("codebook: empty signal set");
            if (size_ > (std::size_t{1} << 40) / sets_[g].size()) throw std::invalid_argument("codebook: too many codewords");
            size_ *= sets_[g].size();
        }
        // Per-group partial codewords, so a full codeword is a sum of g lookups.
        partial_.resize(sets_.size());
        for (std::size_t g = 0; g < sets_.size(); ++g)
            for (const auto& p : sets_[g].points) partial_[g].push_back(group_matrix(static_cast<int>(g), p));
    }

    const LinearSpaceTimeDesign& design() const { return design_; }
    const std::vector<SignalSet>& signal_sets() const { return sets_; }
    std::size_t size() const { return size_; }
    int groups() const { return static_cast<int>(sets_.size()); }

    std::vector<std::size_t> split_index(std::size_t index) const {
        std::vector<std::size_t> out(sets_.size());
        for (std::size_t g = 0; g < sets_.size(); ++g) {
            out[g] = index % sets_[g].size();
            index /= sets_[g].size();
        }
        return out;
    }

    std::size_t join_index(const std::vector<std::size_t>& parts) const {
        std::size_t idx = 0;
        for (std::size_t g = sets_.size(); g-- > 0;) idx = idx * sets_[g].size() + parts[g];
        return idx;
    }

    RVector symbols(std::size_t index) const {
        RVector x = RVector::Zero(design_.K());
        const auto parts = split_index(index);
        for (std::size_t g = 0; g < sets_.size(); ++g) {
            const RVector& p = sets_[g].points[parts[g]];
            for (std::size_t j = 0; j < design_.partition[g].size(); ++j) x(design_.partition[g][j]) = p(static_cast<Eigen::Index>(j));
        }
        return x;
    }

    // Contribution of group g alone with its variables set to point p.
    CMatrix group_matrix(int g, const RVector& p) const {
        const auto& grp = design_.partition[static_cast<std::size_t>(g)];
        CMatrix out = CMatrix::Zero(design_.T, design_.NT);
        for (std::size_t j = 0; j < grp.size(); ++j)
            out += p(static_cast<Eigen::Index>(j)) * design_.weights[static_cast<std::size_t>(grp[j])];
        return out;
    }

    const CMatrix& group_codeword(int g, std::size_t point) const {
        return partial_[static_cast<std::size_t>(g)][point];
    }

    CMatrix codeword(std::size_t index) const {
        if (index >= size_) throw std::out_of_range("codebook index out of range");
        const auto parts = split_index(index);
        CMatrix out = CMatrix::Zero(design_.T, design_.NT);
        for (std::size_t g = 0; g < sets_.size(); ++g) out += partial_[g][parts[g]];
        return out;
    }

private:
    LinearSpaceTimeDesign design_;
    std::vector<SignalSet> sets_;
    std::vector<std::vector<CMatrix>> partial_;
    std::size_t size_ = 0;
};

}  // namespace cliffstbc
