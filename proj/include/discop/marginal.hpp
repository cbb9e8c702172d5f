#ifndef DISCOP_MARGINAL_HPP
#define DISCOP_MARGINAL_HPP

#include <span>
#include <vector>

namespace discop {

/// A permutation of the bin labels {1,...,w}, stored 1-based.
class Permutation {
public:
    explicit Permutation(std::vector<int> mapping);
    static Permutation identity(int w);

    int size() const { return static_cast<int>(mapping_.size()); }
    /// sigma(s) for 1 <= s <= w.
    int map(int s) const;
    Permutation inverse() const;
    std::span<const int> mapping() const { return mapping_; }

private:
    std::vector<int> mapping_;
};

/// A probability mass function over the ordered bins {1,...,w}.
///
/// Entries must be nonnegative and sum to 1 within 1e-9; sums further than
/// ~1e-13 from 1 are rescaled at construction so the stored vector always
/// sums to 1 within 1e-12. Inputs outside the 1e-9 band are rejected rather
/// than silently renormalized.
class Marginal {
public:
    explicit Marginal(std::vector<double> probs);

    int size() const { return static_cast<int>(probs_.size()); }
    /// Mass of bin s, 1-based.
    double prob(int bin) const;
    /// Cumulative mass of bins 1..s for 0 <= s <= w; cdf(0)=0 and cdf(w)=1.
    double cdf(int upto) const;
    std::span<const double> probs() const { return probs_; }

    /// Merge bins (bin, bin+1) into one; requires w >= 2.
    Marginal collapsed(int bin) const;
    /// Relabeled pmf q'(s) = q(sigma(s)).
    Marginal permuted(const Permutation& sigma) const;
    /// Split bin into two children carrying frac and 1-frac of its mass.
    /// The children are constructed so that collapsing them recovers the
    /// original mass bit-for-bit.
    Marginal split(int bin, double frac) const;

private:
    std::vector<double> probs_;
    std::vector<double> cdf_; // cdf_[s], s = 0..w
};

/// An ordered list of marginals, one per dimension.
class Profile {
public:
    explicit Profile(std::vector<Marginal> marginals);

    int dims() const { return static_cast<int>(marginals_.size()); }
    /// Marginal of dimension i, 1-based.
    const Marginal& at(int dim) const;
    std::vector<int> shape() const;
    std::size_t cell_count() const;

    /// Profile with bins (bin, bin+1) of dimension dim merged.
    Profile collapsed(int dim, int bin) const;
    /// Profile with dimension dim relabeled by sigma.
    Profile permuted(int dim, const Permutation& sigma) const;

private:
    std::vector<Marginal> marginals_;
};

} // namespace discop

#endif
