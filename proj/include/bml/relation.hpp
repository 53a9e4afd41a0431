#pragma once

#include <cstddef>
#include <vector>

namespace bml {

// Binary relation on {0, ..., n-1} stored as a dense matrix.
class Relation {
public:
    Relation() = default;
    explicit Relation(std::size_t n) : n_(n), bits_(n * n, 0) {}

    static Relation identity(std::size_t n) {
        Relation r(n);
        for (std::size_t i = 0; i < n; ++i)
            r.set(i, i);
        return r;
    }

    std::size_t size() const { return n_; }

    bool operator()(std::size_t a, std::size_t b) const { return bits_[a * n_ + b] != 0; }
    void set(std::size_t a, std::size_t b, bool v = true) { bits_[a * n_ + b] = v ? 1 : 0; }

    void close_reflexive_transitive() {
        for (std::size_t i = 0; i < n_; ++i)
            set(i, i);
        for (std::size_t k = 0; k < n_; ++k)
            for (std::size_t i = 0; i < n_; ++i)
                if ((*this)(i, k))
                    for (std::size_t j = 0; j < n_; ++j)
                        if ((*this)(k, j))
                            set(i, j);
    }

    Relation closed() const {
        Relation r = *this;
        r.close_reflexive_transitive();
        return r;
    }

    bool is_reflexive() const {
        for (std::size_t i = 0; i < n_; ++i)
            if (!(*this)(i, i))
                return false;
        return true;
    }

    bool is_transitive() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k)
                if ((*this)(i, k))
                    for (std::size_t j = 0; j < n_; ++j)
                        if ((*this)(k, j) && !(*this)(i, j))
                            return false;
        return true;
    }

    bool is_preorder() const { return is_reflexive() && is_transitive(); }

    bool subset_of(const Relation& o) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] && !o.bits_[i])
                return false;
        return true;
    }

    // (a, c) whenever a this b and b o c.
    Relation compose(const Relation& o) const {
        Relation r(n_);
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if ((*this)(a, b))
                    for (std::size_t c = 0; c < n_; ++c)
                        if (o(b, c))
                            r.set(a, c);
        return r;
    }

    Relation united(const Relation& o) const {
        Relation r = *this;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            r.bits_[i] = bits_[i] | o.bits_[i];
        return r;
    }

    friend bool operator==(const Relation&, const Relation&) = default;

private:
    std::size_t n_ = 0;
    std::vector<char> bits_;
};

}  // namespace bml
