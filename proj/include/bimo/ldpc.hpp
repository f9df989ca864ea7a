#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "bimo/errors.hpp"
#include "bimo/metrics.hpp"
#include "bimo/random.hpp"

// Systematic LDPC codes: randomized girth-6 parity-check construction,
// dense GF(2) elimination for the encoder, and a flooding-schedule
// sum-product decoder in the log domain.

namespace bimo {

struct CodeSpec {
    long info_len = 0;   // L
    long parity_len = 0; // r

    long block_len() const { return info_len + parity_len; }
    double rate() const { return static_cast<double>(info_len) / static_cast<double>(block_len()); }
};

// Sparse binary matrix, kept as sorted index lists both ways.
struct ParityCheckMatrix {
    long rows = 0;
    long cols = 0;
    std::vector<std::vector<long>> row_index; // per row: column positions of ones
    std::vector<std::vector<long>> col_index; // per column: row positions of ones
};

// Parity-check matrix plus the dense encoder extracted from it. Codewords
// are (info bits | parity bits): the last parity_len columns of h were made
// invertible during construction, so the systematic prefix is literal.
struct Code {
    CodeSpec spec;
    ParityCheckMatrix h;
    std::vector<std::uint64_t> parity_gen; // r rows * info_words, bit-packed
    long info_words = 0;
};

struct DecodeResult {
    std::vector<std::uint8_t> decided_bits;
    bool converged = false;
    int iterations_used = 0;
};

namespace detail {

inline void rebuild_row_index(ParityCheckMatrix& h) {
    h.row_index.assign(static_cast<std::size_t>(h.rows), {});
    for (long c = 0; c < h.cols; ++c)
        for (long r : h.col_index[static_cast<std::size_t>(c)])
            h.row_index[static_cast<std::size_t>(r)].push_back(c);
    for (auto& row : h.row_index) std::sort(row.begin(), row.end());
}

// One randomized placement attempt: column weight w, row loads kept within
// one of each other, no two columns sharing more than one row (girth >= 6).
inline bool try_place(long rows, long cols, int w, RandomStream& rng,
                      std::vector<std::vector<long>>& col_index) {
    col_index.assign(static_cast<std::size_t>(cols), {});
    std::vector<long> load(static_cast<std::size_t>(rows), 0);
    std::unordered_set<std::uint64_t> used_pairs;
    used_pairs.reserve(static_cast<std::size_t>(cols) * w * 2);
    auto pair_key = [rows](long a, long b) {
        if (a > b) std::swap(a, b);
        return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(rows) +
               static_cast<std::uint64_t>(b);
    };

    std::vector<long> chosen, candidates;
    for (long c = 0; c < cols; ++c) {
        constexpr int kColumnRetries = 80;
        bool placed = false;
        for (int attempt = 0; attempt < kColumnRetries && !placed; ++attempt) {
            chosen.clear();
            while (static_cast<int>(chosen.size()) < w) {
                // Least-loaded rows compatible with the picks so far.
                long best = -1;
                candidates.clear();
                for (long r = 0; r < rows; ++r) {
                    if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) continue;
                    bool ok = true;
                    for (long prev : chosen)
                        if (used_pairs.count(pair_key(prev, r))) { ok = false; break; }
                    if (!ok) continue;
                    if (best < 0 || load[static_cast<std::size_t>(r)] < best) {
                        best = load[static_cast<std::size_t>(r)];
                        candidates.assign(1, r);
                    } else if (load[static_cast<std::size_t>(r)] == best) {
                        candidates.push_back(r);
                    }
                }
                if (candidates.empty()) break;
                chosen.push_back(candidates[static_cast<std::size_t>(
                    rng.next_u64() % candidates.size())]);
            }
            placed = static_cast<int>(chosen.size()) == w;
        }
        if (!placed) return false;
        for (std::size_t i = 0; i < chosen.size(); ++i)
            for (std::size_t j = i + 1; j < chosen.size(); ++j)
                used_pairs.insert(pair_key(chosen[i], chosen[j]));
        for (long r : chosen) ++load[static_cast<std::size_t>(r)];
        std::sort(chosen.begin(), chosen.end());
        col_index[static_cast<std::size_t>(c)] = chosen;
    }

    const auto [mn, mx] = std::minmax_element(load.begin(), load.end());
    return *mx - *mn <= 1;
}

// Dense bit-packed GF(2) matrix helpers used by the encoder extraction.
struct DenseBits {
    long rows = 0, cols = 0, words = 0;
    std::vector<std::uint64_t> data;

    DenseBits(long r, long c)
        : rows(r), cols(c), words((c + 63) / 64),
          data(static_cast<std::size_t>(r) * static_cast<std::size_t>(words), 0) {}
    std::uint64_t* row(long r) { return data.data() + static_cast<std::size_t>(r) * words; }
    bool get(long r, long c) const {
        return (data[static_cast<std::size_t>(r) * words + c / 64] >> (c % 64)) & 1ULL;
    }
    void set(long r, long c) {
        data[static_cast<std::size_t>(r) * words + c / 64] |= 1ULL << (c % 64);
    }
    void flip(long r, long c) {
        data[static_cast<std::size_t>(r) * words + c / 64] ^= 1ULL << (c % 64);
    }
    void xor_rows(long dst, long src) {
        std::uint64_t* d = row(dst);
        const std::uint64_t* s = row(src);
        for (long w = 0; w < words; ++w) d[w] ^= s[w];
    }
    void swap_rows(long a, long b) {
        std::uint64_t* pa = row(a);
        std::uint64_t* pb = row(b);
        for (long w = 0; w < words; ++w) std::swap(pa[w], pb[w]);
    }
    void swap_cols(long a, long b) {
        for (long r = 0; r < rows; ++r) {
            bool va = get(r, a), vb = get(r, b);
            if (va != vb) { flip(r, a); flip(r, b); }
        }
    }
};

// Gauss-Jordan reduction making the last r columns an identity. Columns are
// swapped into the parity block when a pivot is missing there; the swaps are
// reported so they can be baked into the sparse matrix. Returns false if the
// matrix is rank deficient.
inline bool reduce_to_systematic(DenseBits& m, long info_len,
                                 std::vector<std::pair<long, long>>& swaps) {
    const long r = m.rows;
    for (long i = 0; i < r; ++i) {
        const long pc = info_len + i;
        long pivot = -1;
        for (long k = i; k < r; ++k)
            if (m.get(k, pc)) { pivot = k; break; }
        if (pivot < 0) {
            // No usable row under this parity column: swap in one that works.
            long repl = -1;
            for (long j = 0; j < m.cols && repl < 0; ++j) {
                if (j >= info_len && j <= pc) continue; // already pivoted or current
                for (long k = i; k < r; ++k)
                    if (m.get(k, j)) { repl = j; break; }
            }
            if (repl < 0) return false;
            m.swap_cols(repl, pc);
            swaps.emplace_back(repl, pc);
            for (long k = i; k < r; ++k)
                if (m.get(k, pc)) { pivot = k; break; }
        }
        if (pivot != i) m.swap_rows(i, pivot);
        for (long k = 0; k < r; ++k)
            if (k != i && m.get(k, pc)) m.xor_rows(k, i);
    }
    return true;
}

} // namespace detail

// Deterministic randomized construction. Column weight min(3, r), row
// weights within one of each other, no 4-cycles, full row rank; internal
// retries reseed deterministically from the caller's seed before giving up.
inline Code construct_code(const CodeSpec& spec, std::uint64_t seed) {
    if (spec.info_len < 1 || spec.parity_len < 1)
        throw std::domain_error("construct_code: info and parity lengths must be >= 1");
    const long r = spec.parity_len;
    const long n = spec.block_len();
    const int w = static_cast<int>(std::min<long>(3, r));
    if (w < 2)
        throw ConstructionFailed(
            "construct_code: column weight >= 2 impossible with one check row");

    constexpr int kAttempts = 60;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        std::vector<std::vector<long>> col_index;
        if (!detail::try_place(r, n, w, rng, col_index)) continue;

        detail::DenseBits dense(r, n);
        for (long c = 0; c < n; ++c)
            for (long row : col_index[static_cast<std::size_t>(c)]) dense.set(row, c);

        std::vector<std::pair<long, long>> swaps;
        if (!detail::reduce_to_systematic(dense, spec.info_len, swaps)) continue;

        Code code;
        code.spec = spec;
        code.h.rows = r;
        code.h.cols = n;
        code.h.col_index = std::move(col_index);
        for (const auto& [a, b] : swaps)
            std::swap(code.h.col_index[static_cast<std::size_t>(a)],
                      code.h.col_index[static_cast<std::size_t>(b)]);
        detail::rebuild_row_index(code.h);

        code.info_words = (spec.info_len + 63) / 64;
        code.parity_gen.assign(
            static_cast<std::size_t>(r) * static_cast<std::size_t>(code.info_words), 0);
        for (long i = 0; i < r; ++i)
            for (long j = 0; j < spec.info_len; ++j)
                if (dense.get(i, j))
                    code.parity_gen[static_cast<std::size_t>(i) * code.info_words + j / 64] |=
                        1ULL << (j % 64);
        return code;
    }
    throw ConstructionFailed("construct_code: retry budget exhausted for " +
                             std::to_string(spec.info_len) + "+" + std::to_string(r));
}

inline std::vector<std::uint8_t> encode(const Code& code, const std::vector<std::uint8_t>& info_bits) {
    if (static_cast<long>(info_bits.size()) != code.spec.info_len)
        throw LengthMismatch("encode: expected " + std::to_string(code.spec.info_len) +
                             " info bits, got " + std::to_string(info_bits.size()));
    std::vector<std::uint64_t> packed(static_cast<std::size_t>(code.info_words), 0);
    for (long j = 0; j < code.spec.info_len; ++j)
        if (info_bits[static_cast<std::size_t>(j)])
            packed[static_cast<std::size_t>(j / 64)] |= 1ULL << (j % 64);

    std::vector<std::uint8_t> cw(static_cast<std::size_t>(code.spec.block_len()), 0);
    std::copy(info_bits.begin(), info_bits.end(), cw.begin());
    for (long i = 0; i < code.spec.parity_len; ++i) {
        const std::uint64_t* row =
            code.parity_gen.data() + static_cast<std::size_t>(i) * code.info_words;
        std::uint64_t acc = 0;
        for (long wd = 0; wd < code.info_words; ++wd) acc ^= row[wd] & packed[static_cast<std::size_t>(wd)];
        cw[static_cast<std::size_t>(code.spec.info_len + i)] =
            static_cast<std::uint8_t>(__builtin_parityll(acc));
    }
    return cw;
}

inline std::vector<std::uint8_t> syndrome(const Code& code, const std::vector<std::uint8_t>& bits) {
    if (static_cast<long>(bits.size()) != code.spec.block_len())
        throw LengthMismatch("syndrome: expected " + std::to_string(code.spec.block_len()) +
                             " bits, got " + std::to_string(bits.size()));
    std::vector<std::uint8_t> s(static_cast<std::size_t>(code.h.rows), 0);
    for (long i = 0; i < code.h.rows; ++i) {
        std::uint8_t acc = 0;
        for (long c : code.h.row_index[static_cast<std::size_t>(i)])
            acc ^= bits[static_cast<std::size_t>(c)];
        s[static_cast<std::size_t>(i)] = acc;
    }
    return s;
}

// Flooding sum-product decoder with a reusable message workspace.
//
// Messages are natural-log LLRs, positive favoring bit 1 (matching the
// demappers). With that sign, a parity check combines incoming messages as
//   out = -2 atanh( prod_i -tanh(in_i / 2) ),
// i.e. the textbook tanh rule with both signs flipped, because the classic
// form assumes the opposite LLR orientation. Inputs to tanh are clamped to
// |x| <= 30, which bounds every message and keeps atanh off its poles.
//
// Convergence means: the bitwise decision satisfies every check AND no
// posterior is exactly zero (an all-tie input like the zero LLR vector
// decides to the all-zero codeword by the tie -> 0 rule, but carries no
// information, so it is not certified as converged).
class Decoder {
  public:
    explicit Decoder(const Code& code) : code_(&code) {
        const long r = code.h.rows;
        edge_count_ = 0;
        for (long i = 0; i < r; ++i)
            edge_count_ += static_cast<long>(code.h.row_index[static_cast<std::size_t>(i)].size());
        row_ptr_.resize(static_cast<std::size_t>(r) + 1);
        edge_col_.resize(static_cast<std::size_t>(edge_count_));
        long e = 0;
        for (long i = 0; i < r; ++i) {
            row_ptr_[static_cast<std::size_t>(i)] = e;
            for (long c : code.h.row_index[static_cast<std::size_t>(i)])
                edge_col_[static_cast<std::size_t>(e++)] = c;
        }
        row_ptr_[static_cast<std::size_t>(r)] = e;
        r_msg_.resize(static_cast<std::size_t>(edge_count_));
        scratch_.resize(64);
        total_.resize(static_cast<std::size_t>(code.h.cols));
        decided_.resize(static_cast<std::size_t>(code.h.cols));
    }

    DecodeResult run(const std::vector<Llr>& llrs, int max_iters) {
        const Code& code = *code_;
        const long n = code.h.cols;
        const long r = code.h.rows;
        if (static_cast<long>(llrs.size()) != n)
            throw LengthMismatch("decode: expected " + std::to_string(n) + " LLRs, got " +
                                 std::to_string(llrs.size()));
        for (const Llr& l : llrs)
            if (!std::isfinite(l.value))
                throw std::invalid_argument("decode: non-finite channel LLR");

        std::fill(r_msg_.begin(), r_msg_.end(), 0.0);
        int iters = 0;
        bool converged = refresh_decision(llrs);
        while (!converged && iters < max_iters) {
            ++iters;
            // Check-node update; the variable-to-check message on edge e is
            // total[col] - r_msg[e] from the previous iteration.
            for (long i = 0; i < r; ++i) {
                const long b = row_ptr_[static_cast<std::size_t>(i)];
                const long d = row_ptr_[static_cast<std::size_t>(i) + 1] - b;
                if (static_cast<long>(scratch_.size()) < 2 * d) scratch_.resize(2 * d);
                double* u = scratch_.data();      // per-edge -tanh(q/2)
                double* suffix = scratch_.data() + d;
                for (long k = 0; k < d; ++k) {
                    const long e = b + k;
                    double q = total_[static_cast<std::size_t>(
                                   edge_col_[static_cast<std::size_t>(e)])] -
                               r_msg_[static_cast<std::size_t>(e)];
                    q = std::clamp(q, -30.0, 30.0);
                    u[k] = -std::tanh(0.5 * q);
                }
                suffix[d - 1] = 1.0;
                for (long k = d - 2; k >= 0; --k) suffix[k] = suffix[k + 1] * u[k + 1];
                double prefix = 1.0;
                for (long k = 0; k < d; ++k) {
                    const double except = prefix * suffix[k];
                    r_msg_[static_cast<std::size_t>(b + k)] = -2.0 * std::atanh(except);
                    prefix *= u[k];
                }
            }
            converged = refresh_decision(llrs);
        }

        DecodeResult out;
        out.decided_bits = decided_;
        out.converged = converged;
        out.iterations_used = iters;
        return out;
    }

  private:
    // Recomputes posteriors and the hard decision; returns the convergence
    // verdict. Also asserts the no-non-finite-messages invariant.
    bool refresh_decision(const std::vector<Llr>& llrs) {
        const Code& code = *code_;
        const long n = code.h.cols;
        const long r = code.h.rows;
        for (long j = 0; j < n; ++j) total_[static_cast<std::size_t>(j)] = llrs[static_cast<std::size_t>(j)].value;
        for (long e = 0; e < edge_count_; ++e) {
            if (!std::isfinite(r_msg_[static_cast<std::size_t>(e)]))
                throw std::logic_error("decode: non-finite check message");
            total_[static_cast<std::size_t>(edge_col_[static_cast<std::size_t>(e)])] +=
                r_msg_[static_cast<std::size_t>(e)];
        }
        bool any_tie = false;
        for (long j = 0; j < n; ++j) {
            const double t = total_[static_cast<std::size_t>(j)];
            decided_[static_cast<std::size_t>(j)] = t > 0.0 ? 1 : 0;
            if (t == 0.0) any_tie = true;
        }
        if (any_tie) return false;
        for (long i = 0; i < r; ++i) {
            std::uint8_t acc = 0;
            for (long e = row_ptr_[static_cast<std::size_t>(i)];
                 e < row_ptr_[static_cast<std::size_t>(i) + 1]; ++e)
                acc ^= decided_[static_cast<std::size_t>(edge_col_[static_cast<std::size_t>(e)])];
            if (acc) return false;
        }
        return true;
    }

    const Code* code_;
    long edge_count_ = 0;
    std::vector<long> row_ptr_;
    std::vector<long> edge_col_;
    std::vector<double> r_msg_;
    std::vector<double> scratch_;
    std::vector<double> total_;
    std::vector<std::uint8_t> decided_;
};

inline DecodeResult decode(const Code& code, const std::vector<Llr>& llrs, int max_iters) {
    Decoder dec(code);
    return dec.run(llrs, max_iters);
}

// Plain-text sparse export (n m / max weights / per-column then per-row
// 1-based index lists, zero-padded to the maxima).
inline void write_alist(const ParityCheckMatrix& h, std::ostream& os) {
    std::size_t wc = 0, wr = 0;
    for (const auto& c : h.col_index) wc = std::max(wc, c.size());
    for (const auto& r : h.row_index) wr = std::max(wr, r.size());
    os << h.cols << " " << h.rows << "\n" << wc << " " << wr << "\n";
    for (long c = 0; c < h.cols; ++c)
        os << h.col_index[static_cast<std::size_t>(c)].size() << (c + 1 < h.cols ? " " : "\n");
    for (long r = 0; r < h.rows; ++r)
        os << h.row_index[static_cast<std::size_t>(r)].size() << (r + 1 < h.rows ? " " : "\n");
    auto emit = [&os](const std::vector<long>& idx, std::size_t width) {
        for (std::size_t k = 0; k < width; ++k) {
            if (k) os << " ";
            os << (k < idx.size() ? idx[k] + 1 : 0);
        }
        os << "\n";
    };
    for (const auto& c : h.col_index) emit(c, wc);
    for (const auto& r : h.row_index) emit(r, wr);
}

// Reads both padded and unpadded alist files. Index lists are 1-based and
// never contain 0, so trailing zero padding is unambiguous; the per-row
// lists at the end are optional but verified when present.
inline ParityCheckMatrix read_alist(std::istream& is) {
    std::vector<long> tok;
    for (long v; is >> v;) tok.push_back(v);
    std::size_t pos = 0;
    auto fail = []() -> long { throw std::runtime_error("read_alist: malformed input"); };
    auto next = [&]() { return pos < tok.size() ? tok[pos++] : fail(); };

    ParityCheckMatrix h;
    h.cols = next();
    h.rows = next();
    if (h.cols < 1 || h.rows < 1) fail();
    const long wc = next(), wr = next();
    std::vector<long> col_w(static_cast<std::size_t>(h.cols));
    std::vector<long> row_w(static_cast<std::size_t>(h.rows));
    for (auto& v : col_w) { v = next(); if (v < 0 || v > wc) fail(); }
    for (auto& v : row_w) { v = next(); if (v < 0 || v > wr) fail(); }

    // Collects `declared` indices, tolerating zero padding up to `width`
    // tokens; stops early when padding is absent.
    auto read_list = [&](long declared, long width, long upper) {
        std::vector<long> lst;
        long used = 0;
        while (static_cast<long>(lst.size()) < declared) {
            const long t = next();
            if (++used > width) fail();
            if (t == 0) continue;
            if (t < 1 || t > upper) fail();
            lst.push_back(t - 1);
        }
        while (used < width && pos < tok.size() && tok[pos] == 0) { ++pos; ++used; }
        std::sort(lst.begin(), lst.end());
        if (std::adjacent_find(lst.begin(), lst.end()) != lst.end()) fail();
        return lst;
    };

    h.col_index.resize(static_cast<std::size_t>(h.cols));
    for (long c = 0; c < h.cols; ++c)
        h.col_index[static_cast<std::size_t>(c)] =
            read_list(col_w[static_cast<std::size_t>(c)], wc, h.rows);
    detail::rebuild_row_index(h);
    for (long r = 0; r < h.rows; ++r)
        if (static_cast<long>(h.row_index[static_cast<std::size_t>(r)].size()) !=
            row_w[static_cast<std::size_t>(r)])
            fail();
    if (pos < tok.size()) { // per-row lists present: verify them
        for (long r = 0; r < h.rows; ++r)
            if (read_list(row_w[static_cast<std::size_t>(r)], wr, h.cols) !=
                h.row_index[static_cast<std::size_t>(r)])
                fail();
        if (pos != tok.size()) fail();
    }
    return h;
}

} // namespace bimo
