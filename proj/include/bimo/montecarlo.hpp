#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "bimo/capacity.hpp"
#include "bimo/channel.hpp"
#include "bimo/errors.hpp"
#include "bimo/format.hpp"
#include "bimo/ldpc.hpp"
#include "bimo/metrics.hpp"
#include "bimo/random.hpp"

// Coded BER/FER simulation over three channel models matched by their
// uncoded hard-decision error rate: the photon-count channel itself (soft
// count-difference LLRs), the binary symmetric channel it induces (hard
// LLRs), and an antipodal-AWGN reference at the SNR giving the same raw
// error rate.
//
// Reproducibility contract: frame f of point i depends only on
// derive_seed(derive_seed(master_seed, i), f), and the stopping rule is
// applied by scanning frame results in index order, so output is identical
// for any worker count.

namespace bimo {

enum class ChannelModelKind { Bimo, Bsc, Awgn };

inline const char* model_name(ChannelModelKind m) {
    switch (m) {
        case ChannelModelKind::Bimo: return "bimo";
        case ChannelModelKind::Bsc: return "bsc";
        default: return "awgn";
    }
}

// One operating point, given either as a target raw error rate or as a mean
// photon number (each with a phase-diffusion width); the other coordinate is
// resolved so records always carry both.
struct PointSpec {
    double qber_target = 0.0;
    double nc = 0.0;
    double delta = 0.0;
    bool by_nc = false;
};

struct SimConfig {
    CodeSpec code_spec;
    ChannelModelKind model = ChannelModelKind::Bimo;
    std::vector<PointSpec> points;
    long max_frames = 100000;
    long min_frame_errors = 100;
    int max_iters = 50;
    std::uint64_t master_seed = 1;
    std::uint64_t code_seed = 7;
    int workers = 1;
};

struct SimRecord {
    std::string model;
    double rate = 0.0;
    double qber_target = 0.0;
    double nc = 0.0;
    double delta = 0.0;
    long frames_run = 0;
    long frame_errors = 0;
    long info_bit_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    std::uint64_t seed = 0; // per-point derived seed
};

inline std::string sim_record_csv_header() {
    return "model,rate,qber_target,nc,delta,frames_run,frame_errors,info_bit_errors,ber,fer,seed";
}

inline std::string to_csv_row(const SimRecord& r) {
    std::string s;
    s += r.model;
    s += ',';
    s += format_real(r.rate);
    s += ',';
    s += format_real(r.qber_target);
    s += ',';
    s += format_real(r.nc);
    s += ',';
    s += format_real(r.delta);
    s += ',';
    s += std::to_string(r.frames_run);
    s += ',';
    s += std::to_string(r.frame_errors);
    s += ',';
    s += std::to_string(r.info_bit_errors);
    s += ',';
    s += format_real(r.ber);
    s += ',';
    s += format_real(r.fer);
    s += ',';
    s += std::to_string(r.seed);
    return s;
}

namespace detail {

struct ResolvedPoint {
    double qber_target = 0.0;
    double nc = 0.0;
    double delta = 0.0;
};

inline ResolvedPoint resolve_point(const PointSpec& p) {
    ResolvedPoint out;
    out.delta = p.delta;
    if (p.by_nc) {
        out.nc = p.nc;
        out.qber_target = qber(ChannelParams(p.nc, p.delta));
        if (!(out.qber_target > 0.0 && out.qber_target < 0.5))
            throw DegenerateChannel("operating point has no usable raw error rate");
    } else {
        out.qber_target = p.qber_target;
        out.nc = nc_for_qber(p.qber_target, p.delta); // equivalent photon number
    }
    return out;
}

// Channel front end for one frame; all randomness comes from the frame's
// own stream, in a fixed draw order.
class FrameChannel {
  public:
    FrameChannel(ChannelModelKind model, const ResolvedPoint& pt)
        : model_(model), params_(pt.nc, pt.delta) {
        if (model == ChannelModelKind::Bimo) {
            const double q = q_param(pt.delta);
            if (q >= 0.5) throw DegenerateChannel("arms are indistinguishable");
            llr_scale_ = std::log(q / (1.0 - q));
        } else if (model == ChannelModelKind::Bsc) {
            crossover_ = pt.qber_target;
            bsc_mag_ = bsc_llr(crossover_, Bit::one).value;
        } else {
            awgn_ = snr_from_qber(pt.qber_target);
        }
    }

    Llr push(Bit sent, RandomStream& rng) const {
        switch (model_) {
            case ChannelModelKind::Bimo: {
                const PhotonOutcome o = sample_outcome(params_, sent, rng);
                return {(static_cast<double>(o.n0) - static_cast<double>(o.n1)) * llr_scale_};
            }
            case ChannelModelKind::Bsc: {
                const bool flipped = rng.uniform01() < crossover_;
                const Bit received = flipped ? flip(sent) : sent;
                return {received == Bit::one ? bsc_mag_ : -bsc_mag_};
            }
            default:
                return awgn_sample_llr(awgn_, sent, rng);
        }
    }

    // Hard decision for uncoded checks, matching the decoder's conventions.
    Bit push_hard(Bit sent, RandomStream& rng) const {
        if (model_ == ChannelModelKind::Bimo) {
            const PhotonOutcome o = sample_outcome(params_, sent, rng);
            return hard_decision(o, rng);
        }
        const Llr l = push(sent, rng);
        if (l.value > 0.0) return Bit::one;
        if (l.value < 0.0) return Bit::zero;
        return make_bit(rng.coin());
    }

  private:
    ChannelModelKind model_;
    ChannelParams params_;
    double llr_scale_ = 0.0;
    double crossover_ = 0.0;
    double bsc_mag_ = 0.0;
    AwgnOperatingPoint awgn_;
};

struct FrameResult {
    int info_bit_errors = 0;
};

inline FrameResult simulate_frame(const Code& code, Decoder& decoder,
                                  const FrameChannel& chan, int max_iters,
                                  std::uint64_t frame_seed) {
    const long L = code.spec.info_len;
    const long n = code.spec.block_len();
    RandomStream rng(frame_seed);

    std::vector<std::uint8_t> info(static_cast<std::size_t>(L));
    std::uint64_t word = 0;
    for (long j = 0; j < L; ++j) {
        if (j % 64 == 0) word = rng.next_u64();
        info[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((word >> (j % 64)) & 1ULL);
    }
    const std::vector<std::uint8_t> cw = encode(code, info);

    std::vector<Llr> llrs(static_cast<std::size_t>(n));
    for (long j = 0; j < n; ++j)
        llrs[static_cast<std::size_t>(j)] = chan.push(make_bit(cw[static_cast<std::size_t>(j)]), rng);

    const DecodeResult res = decoder.run(llrs, max_iters);
    FrameResult out;
    for (long j = 0; j < L; ++j)
        out.info_bit_errors +=
            res.decided_bits[static_cast<std::size_t>(j)] != info[static_cast<std::size_t>(j)];
    return out;
}

inline void validate_config(const SimConfig& config) {
    if (config.max_frames < 1) throw std::domain_error("max_frames must be >= 1");
    if (config.min_frame_errors < 1) throw std::domain_error("min_frame_errors must be >= 1");
    if (config.max_iters < 1) throw std::domain_error("max_iters must be >= 1");
    if (config.workers < 1) throw std::domain_error("workers must be >= 1");
    for (const PointSpec& p : config.points)
        if (!p.by_nc && !(p.qber_target > 0.0 && p.qber_target < 0.5))
            throw std::domain_error("target raw error rate must lie in (0, 1/2)");
}

inline SimRecord run_point_with_code(const SimConfig& config, const Code& code,
                                     std::size_t point_index) {
    const ResolvedPoint pt = resolve_point(config.points[point_index]);
    const FrameChannel chan(config.model, pt);
    const std::uint64_t point_seed = derive_seed(config.master_seed, point_index);

    SimRecord rec;
    rec.model = model_name(config.model);
    rec.rate = code.spec.rate();
    rec.qber_target = pt.qber_target;
    rec.nc = pt.nc;
    rec.delta = pt.delta;
    rec.seed = point_seed;

    const long batch = std::max<long>(64, 16L * config.workers);
    std::vector<FrameResult> results(static_cast<std::size_t>(batch));
    long next_frame = 0;
    bool stopped = false;
    while (!stopped && next_frame < config.max_frames) {
        const long count = std::min<long>(batch, config.max_frames - next_frame);
        if (config.workers == 1) {
            Decoder decoder(code);
            for (long k = 0; k < count; ++k)
                results[static_cast<std::size_t>(k)] =
                    simulate_frame(code, decoder, chan, config.max_iters,
                                   derive_seed(point_seed, static_cast<std::uint64_t>(next_frame + k)));
        } else {
            std::atomic<long> cursor{0};
            auto worker = [&]() {
                Decoder decoder(code);
                for (;;) {
                    const long k = cursor.fetch_add(1);
                    if (k >= count) break;
                    results[static_cast<std::size_t>(k)] =
                        simulate_frame(code, decoder, chan, config.max_iters,
                                       derive_seed(point_seed, static_cast<std::uint64_t>(next_frame + k)));
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(config.workers));
            for (int t = 0; t < config.workers; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        // In-order scan applies the stopping rule exactly as a sequential
        // run would; frames computed past the stop are discarded.
        for (long k = 0; k < count && !stopped; ++k) {
            const FrameResult& fr = results[static_cast<std::size_t>(k)];
            ++rec.frames_run;
            rec.info_bit_errors += fr.info_bit_errors;
            rec.frame_errors += fr.info_bit_errors > 0;
            if (rec.frame_errors >= config.min_frame_errors) stopped = true;
        }
        next_frame += count;
    }

    rec.ber = static_cast<double>(rec.info_bit_errors) /
              (static_cast<double>(rec.frames_run) * static_cast<double>(code.spec.info_len));
    rec.fer = static_cast<double>(rec.frame_errors) / static_cast<double>(rec.frames_run);
    return rec;
}

} // namespace detail

inline SimRecord run_point(const SimConfig& config, std::size_t point_index) {
    detail::validate_config(config);
    if (point_index >= config.points.size())
        throw std::domain_error("run_point: point index out of range");
    const Code code = construct_code(config.code_spec, config.code_seed);
    return detail::run_point_with_code(config, code, point_index);
}

// Runs every point. With a collector, per-point failures are recorded as
// "point <i>: <reason>" and the sweep continues; without one, the first
// failure is rethrown.
inline std::vector<SimRecord> run_sweep(const SimConfig& config,
                                        std::vector<std::string>* point_errors = nullptr) {
    detail::validate_config(config);
    const Code code = construct_code(config.code_spec, config.code_seed);
    std::vector<SimRecord> out;
    out.reserve(config.points.size());
    for (std::size_t i = 0; i < config.points.size(); ++i) {
        try {
            out.push_back(detail::run_point_with_code(config, code, i));
        } catch (const std::exception& e) {
            if (!point_errors) throw;
            point_errors->push_back("point " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

// Uncoded raw error rate of a model at a point: random bits, one channel
// use each, hard decision. All three models must land on the same target.
inline double uncoded_check(ChannelModelKind model, const PointSpec& point, long trials,
                            std::uint64_t seed) {
    if (trials < 1) throw std::domain_error("uncoded_check: trials must be >= 1");
    const detail::ResolvedPoint pt = detail::resolve_point(point);
    const detail::FrameChannel chan(model, pt);
    RandomStream rng(seed);
    long errors = 0;
    for (long t = 0; t < trials; ++t) {
        const Bit sent = make_bit(rng.coin());
        errors += chan.push_hard(sent, rng) != sent;
    }
    return static_cast<double>(errors) / static_cast<double>(trials);
}

} // namespace bimo
