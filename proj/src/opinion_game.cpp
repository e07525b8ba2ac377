#include "stalker/opinion_game.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace stalker {
namespace {

// Ranking key: smaller key = higher rank.  Negating the opinion makes the
// natural pair order "opinion descending, index ascending", the tie rule
// used everywhere (stability, counterparties, gap ranks).
using Key = std::pair<std::int64_t, std::int64_t>;

Key key_of(std::int64_t opinion, std::int64_t index) {
    return {-opinion, index};
}

// 1-based boundary ranks of the gap observable: ceil(0.475 N) and
// ceil(0.525 N), kept in exact integer arithmetic (0.475 = 19/40).
std::int64_t gap_rank_hi(std::int64_t n) { return (19 * n + 39) / 40; }
std::int64_t gap_rank_lo(std::int64_t n) { return (21 * n + 39) / 40; }

double selection_weight(double twice_dist, double gamma) {
    return std::pow(1.0 + 0.5 * twice_dist, -gamma);
}

// Twice the price is integral for both formulas; working with it avoids
// fractional opinions everywhere.
std::int64_t twice_price(const MarketQuote& q, PriceFormula f) {
    return f == PriceFormula::mid ? q.ask + q.bid : q.ask - q.bid;
}

// The three drift classes a trader can be in; the combined bias is
// delta * external strength.
enum DriftClass { kUp = 0, kFlat = 1, kDown = 2 };

DriftClass drift_class(const GameConfig& cfg, std::int64_t opinion,
                       bool owns, std::int64_t tp) {
    if (cfg.drift_rule == DriftRule::role) return owns ? kUp : kDown;
    if (2 * opinion < tp) return kUp;
    if (2 * opinion > tp) return kDown;
    return kFlat;
}

double drift_delta(const GameConfig& cfg, DriftClass c) {
    switch (c) {
        case kUp: return std::exp(cfg.drift_magnitude);
        case kDown: return std::exp(-cfg.drift_magnitude);
        default: return 1.0;
    }
}

int sample_pmf(const std::vector<double>& pmf, RngStream& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < pmf.size(); ++j) {
        acc += pmf[j];
        if (u < acc) return static_cast<int>(j);
    }
    return static_cast<int>(pmf.size()) - 1;
}

// Incremental book engine.  The two sets order each ownership class by
// rank, which makes the stability boundary, both trade counterparties and
// the gap ranks O(log N) or better per update.
class Engine {
  public:
    // The weight table only pays for itself on long-lived engines; one-shot
    // wrappers skip it and evaluate weights directly.
    Engine(const GameConfig& cfg, OrderBookState book, bool with_table = false)
        : cfg_(cfg), book_(std::move(book)) {
        const auto n = static_cast<std::int64_t>(book_.opinions.size());
        if (n != cfg_.n_traders ||
            static_cast<std::int64_t>(book_.owns.size()) != n)
            throw std::invalid_argument(
                "opinion game: book size disagrees with the configuration");
        std::int64_t held = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (book_.owns[i]) {
                ++held;
                owners_.insert(key_of(book_.opinions[i], i));
            } else {
                seekers_.insert(key_of(book_.opinions[i], i));
            }
        }
        if (held != cfg_.n_shares)
            throw std::invalid_argument(
                "opinion game: share count disagrees with the configuration");
        if (owners_.empty() || seekers_.empty())
            throw std::invalid_argument("opinion game: degenerate market");
        if (*owners_.rbegin() > *seekers_.begin())
            throw std::invalid_argument("opinion game: book is not stable");

        if (with_table) {
            const int table = 8192;
            h_half_.resize(table);
            for (int j = 0; j < table; ++j)
                h_half_[j] = selection_weight(j, cfg_.gamma);
        }
    }

    const OrderBookState& state() const { return book_; }
    OrderBookState take() && { return std::move(book_); }

    MarketQuote market_quote() const {
        MarketQuote q;
        q.ask = -owners_.rbegin()->first;
        q.bid = -seekers_.begin()->first;
        q.price = static_cast<double>(twice_price(q, cfg_.price_formula)) / 2.0;
        return q;
    }

    std::size_t select(RngStream& rng, SelectionMethod method) {
        const std::int64_t tp = twice_price(market_quote(), cfg_.price_formula);
        const auto n = static_cast<std::uint64_t>(book_.opinions.size());
        if (method == SelectionMethod::cumulative) return select_exact(rng, tp);
        // Rejection against the envelope h <= 1; an exact draw no matter
        // when we give up and fall through to the explicit method.
        const std::uint64_t cap = 16 * n;
        for (std::uint64_t a = 0; a < cap; ++a) {
            const auto i = static_cast<std::size_t>(rng.uniform_below(n));
            const std::int64_t j =
                std::llabs(2 * book_.opinions[i] - tp);
            const double h =
                j < static_cast<std::int64_t>(h_half_.size())
                    ? h_half_[static_cast<std::size_t>(j)]
                    : selection_weight(static_cast<double>(j), cfg_.gamma);
            if (rng.uniform() < h) return i;
        }
        return select_exact(rng, tp);
    }

    int propose(std::size_t i, double strength, RngStream& rng) {
        const std::int64_t tp = twice_price(market_quote(), cfg_.price_formula);
        if (strength != cached_strength_) {
            for (int c = 0; c < 3; ++c)
                pmf_[c] = move_pmf(
                    drift_delta(cfg_, static_cast<DriftClass>(c)) * strength,
                    cfg_.l);
            cached_strength_ = strength;
        }
        const DriftClass c = drift_class(cfg_, book_.opinions[i],
                                         book_.owns[i] != 0, tp);
        return sample_pmf(pmf_[c], rng) - cfg_.l;
    }

    void apply(std::size_t i, int d, RngStream& rng) {
        if (i >= book_.opinions.size())
            throw std::invalid_argument("opinion game: trader index out of range");
        if (d < -cfg_.l || d > cfg_.l)
            throw std::invalid_argument("opinion game: move outside [-l, l]");
        const MarketQuote pre = market_quote();
        const auto idx = static_cast<std::int64_t>(i);
        const Key oldk = key_of(book_.opinions[i], idx);
        const Key newk = key_of(book_.opinions[i] + d, idx);

        if (book_.owns[i]) {
            if (newk < *seekers_.begin()) {  // still outranks every seeker
                owners_.erase(oldk);
                owners_.insert(newk);
                book_.opinions[i] += d;
            } else {  // i sells to the highest bidder
                const std::int64_t k = draw_jump(rng);
                const auto jt = seekers_.begin();
                const std::int64_t j = jt->second;
                owners_.erase(oldk);
                seekers_.erase(jt);
                book_.opinions[i] = pre.bid - k;
                book_.opinions[j] = pre.bid + k;
                book_.owns[i] = 0;
                book_.owns[j] = 1;
                seekers_.insert(key_of(book_.opinions[i], idx));
                owners_.insert(key_of(book_.opinions[j], j));
            }
        } else {
            if (*owners_.rbegin() < newk) {  // still below every owner
                seekers_.erase(oldk);
                seekers_.insert(newk);
                book_.opinions[i] += d;
            } else {  // i buys from the lowest asker
                const std::int64_t k = draw_jump(rng);
                // lowest index among the minimum-opinion owners
                const auto jt = owners_.lower_bound(
                    {owners_.rbegin()->first,
                     std::numeric_limits<std::int64_t>::min()});
                const std::int64_t j = jt->second;
                owners_.erase(jt);
                seekers_.erase(oldk);
                book_.opinions[i] = pre.ask + k;
                book_.opinions[j] = pre.ask - k;
                book_.owns[i] = 1;
                book_.owns[j] = 0;
                owners_.insert(key_of(book_.opinions[i], idx));
                seekers_.insert(key_of(book_.opinions[j], j));
            }
        }
        ++book_.time_step;

        if (owners_.size() != static_cast<std::size_t>(cfg_.n_shares) ||
            *owners_.rbegin() > *seekers_.begin())
            throw std::logic_error("opinion game: update broke stability");
    }

    std::int64_t gap() const {
        return opinion_at_rank(gap_rank_hi(cfg_.n_traders)) -
               opinion_at_rank(gap_rank_lo(cfg_.n_traders));
    }

  private:
    std::int64_t draw_jump(RngStream& rng) {
        const auto span = static_cast<std::uint64_t>(cfg_.jump_away_max -
                                                     cfg_.jump_away_min + 1);
        return cfg_.jump_away_min +
               static_cast<std::int64_t>(rng.uniform_below(span));
    }

    std::size_t select_exact(RngStream& rng, std::int64_t tp) {
        const std::size_t n = book_.opinions.size();
        std::vector<double> cum(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += selection_weight(
                static_cast<double>(std::llabs(2 * book_.opinions[i] - tp)),
                cfg_.gamma);
            cum[i] = acc;
        }
        const double u = rng.uniform() * acc;
        return static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    }

    // Overall rank r (1-based, best first): owners occupy ranks 1..M in a
    // stable book, seekers the rest; walk in from whichever end is nearer.
    std::int64_t opinion_at_rank(std::int64_t r) const {
        const auto m = static_cast<std::int64_t>(owners_.size());
        const std::set<Key>* s = &owners_;
        std::int64_t pos = r - 1;  // 0-based within the set
        if (r > m) {
            s = &seekers_;
            pos = r - m - 1;
        }
        const auto size = static_cast<std::int64_t>(s->size());
        if (pos < 0 || pos >= size)
            throw std::invalid_argument("opinion game: gap rank out of range");
        if (pos <= size - 1 - pos) {
            auto it = s->begin();
            std::advance(it, pos);
            return -it->first;
        }
        auto it = s->rbegin();
        std::advance(it, size - 1 - pos);
        return -it->first;
    }

    const GameConfig& cfg_;
    OrderBookState book_;
    std::set<Key> owners_, seekers_;
    std::vector<double> h_half_;
    double cached_strength_ = -1.0;
    std::array<std::vector<double>, 3> pmf_;
};

}  // namespace

void GameConfig::validate() const {
    std::ostringstream bad;
    auto fail = [&bad](const std::string& msg) {
        if (bad.tellp() > 0) bad << "; ";
        bad << msg;
    };
    if (n_traders < 2) fail("n_traders must be >= 2");
    if (n_shares < 1 || n_shares >= n_traders)
        fail("n_shares must satisfy 1 <= n_shares < n_traders");
    if (!(gamma >= 0.0)) fail("gamma must be >= 0");
    if (l < 1) fail("l must be >= 1");
    if (!(drift_magnitude >= 0.0)) fail("drift_magnitude must be >= 0");
    if (!(ext_mean > 0.0)) fail("ext_mean must be > 0");
    if (ext_rate_steps < 1) fail("ext_rate_steps must be >= 1");
    if (jump_away_min < 1 || jump_away_max < jump_away_min)
        fail("jump_away range needs 1 <= min <= max");
    if (record_every < 1) fail("record_every must be >= 1");
    if (init_spread < 0) fail("init_spread must be >= 0");
    if (init_gap < 0) fail("init_gap must be >= 0");
    for (std::int64_t s : snapshot_at)
        if (s < 0) {
            fail("snapshot_at entries must be >= 0");
            break;
        }
    if (bad.tellp() > 0)
        throw std::invalid_argument("opinion game config: " + bad.str());
}

OrderBookState init_book(const GameConfig& cfg, RngStream& rng) {
    cfg.validate();
    OrderBookState book;
    const auto n = static_cast<std::size_t>(cfg.n_traders);
    book.opinions.resize(n);
    book.owns.assign(n, 0);
    for (auto& p : book.opinions)
        p = static_cast<std::int64_t>(rng.uniform_below(
                static_cast<std::uint64_t>(cfg.init_spread) + 1)) -
            cfg.init_spread / 2;

    std::vector<Key> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = key_of(book.opinions[i], static_cast<std::int64_t>(i));
    std::nth_element(order.begin(),
                     order.begin() + static_cast<std::ptrdiff_t>(cfg.n_shares),
                     order.end());
    for (std::int64_t r = 0; r < cfg.n_shares; ++r) {
        const auto i = static_cast<std::size_t>(order[static_cast<std::size_t>(r)].second);
        book.owns[i] = 1;
        book.opinions[i] += cfg.init_gap;
    }
    return book;
}

bool is_stable(const OrderBookState& book) {
    if (book.opinions.size() != book.owns.size())
        throw std::invalid_argument("is_stable: malformed book");
    Key worst_owner{std::numeric_limits<std::int64_t>::min(), 0};
    Key best_seeker{std::numeric_limits<std::int64_t>::max(), 0};
    bool any_owner = false, any_seeker = false;
    for (std::size_t i = 0; i < book.opinions.size(); ++i) {
        const Key k = key_of(book.opinions[i], static_cast<std::int64_t>(i));
        if (book.owns[i]) {
            any_owner = true;
            worst_owner = std::max(worst_owner, k);
        } else {
            any_seeker = true;
            best_seeker = std::min(best_seeker, k);
        }
    }
    if (!any_owner || !any_seeker) return true;  // nothing to contradict
    return worst_owner < best_seeker;
}

MarketQuote quote(const OrderBookState& book, PriceFormula formula) {
    if (book.opinions.size() != book.owns.size() || book.opinions.empty())
        throw std::invalid_argument("quote: malformed book");
    MarketQuote q;
    bool any_owner = false, any_seeker = false;
    for (std::size_t i = 0; i < book.opinions.size(); ++i) {
        if (book.owns[i]) {
            q.ask = any_owner ? std::min(q.ask, book.opinions[i])
                              : book.opinions[i];
            any_owner = true;
        } else {
            q.bid = any_seeker ? std::max(q.bid, book.opinions[i])
                               : book.opinions[i];
            any_seeker = true;
        }
    }
    if (!any_owner || !any_seeker)
        throw std::invalid_argument("quote: degenerate market");
    q.price = static_cast<double>(twice_price(q, formula)) / 2.0;
    return q;
}

std::size_t select_trader(const OrderBookState& book, double gamma,
                          RngStream& rng, SelectionMethod method,
                          PriceFormula formula) {
    if (!(gamma >= 0.0))
        throw std::invalid_argument("select_trader: gamma must be >= 0");
    const std::int64_t tp = twice_price(quote(book, formula), formula);
    const auto n = static_cast<std::uint64_t>(book.opinions.size());

    auto exact = [&]() {
        std::vector<double> cum(book.opinions.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < cum.size(); ++i) {
            acc += selection_weight(
                static_cast<double>(std::llabs(2 * book.opinions[i] - tp)),
                gamma);
            cum[i] = acc;
        }
        const double u = rng.uniform() * acc;
        return static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    };
    if (method == SelectionMethod::cumulative) return exact();
    const std::uint64_t cap = 16 * n;
    for (std::uint64_t a = 0; a < cap; ++a) {
        const auto i = static_cast<std::size_t>(rng.uniform_below(n));
        const double h = selection_weight(
            static_cast<double>(std::llabs(2 * book.opinions[i] - tp)), gamma);
        if (rng.uniform() < h) return i;
    }
    return exact();
}

ExternalForce draw_force(const GameConfig& cfg, std::int64_t now,
                         RngStream& rng) {
    ExternalForce f;
    const double sign = (rng.next_u64() >> 63) ? 1.0 : -1.0;
    const double s = -cfg.ext_mean * std::log(rng.uniform_pos());
    f.strength = std::exp(sign * s);
    // discrete memoryless waiting time with the configured mean
    const double q = 1.0 / static_cast<double>(cfg.ext_rate_steps);
    const double u = rng.uniform_pos();
    std::int64_t wait = 1;
    if (q < 1.0)
        wait = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(
                   std::ceil(std::log(u) / std::log1p(-q))));
    f.next_switch = now + wait;
    return f;
}

std::vector<double> move_pmf(double q, int l) {
    if (!(q > 0.0)) throw std::invalid_argument("move_pmf: bias must be > 0");
    if (l < 1) throw std::invalid_argument("move_pmf: l must be >= 1");
    std::vector<double> pmf(2 * static_cast<std::size_t>(l) + 1, 0.0);
    const double base = 1.0 / static_cast<double>(2 * l + 1);
    double rest = 1.0;
    for (int d = -l; d <= l; ++d) {
        if (d == 0) continue;
        const double m = base * std::min(std::pow(q, d), 1.0);
        pmf[static_cast<std::size_t>(d + l)] = m;
        rest -= m;
    }
    pmf[static_cast<std::size_t>(l)] = rest;
    return pmf;
}

int propose_move(const OrderBookState& book, std::size_t i,
                 const ExternalForce& ext, const GameConfig& cfg,
                 RngStream& rng) {
    if (i >= book.opinions.size())
        throw std::invalid_argument("propose_move: trader index out of range");
    const std::int64_t tp =
        twice_price(quote(book, cfg.price_formula), cfg.price_formula);
    const DriftClass c =
        drift_class(cfg, book.opinions[i], book.owns[i] != 0, tp);
    const auto pmf = move_pmf(drift_delta(cfg, c) * ext.strength, cfg.l);
    return sample_pmf(pmf, rng) - cfg.l;
}

OrderBookState apply_update(const OrderBookState& book, std::size_t i, int d,
                            const GameConfig& cfg, RngStream& rng) {
    Engine e(cfg, book);
    e.apply(i, d, rng);
    return std::move(e).take();
}

std::pair<OrderBookState, ExternalForce> step(const OrderBookState& book,
                                              const ExternalForce& ext,
                                              const GameConfig& cfg,
                                              RngStream& rng) {
    Engine e(cfg, book);
    ExternalForce force = ext;
    if (e.state().time_step >= force.next_switch)
        force = draw_force(cfg, e.state().time_step, rng);
    const std::size_t i = e.select(rng, SelectionMethod::rejection);
    const int d = e.propose(i, force.strength, rng);
    e.apply(i, d, rng);
    return {std::move(e).take(), force};
}

SeriesRecord GameSeries::price_series() const {
    SeriesRecord s;
    s.label = "price";
    s.times.reserve(steps.size());
    s.values.assign(price.begin(), price.end());
    for (std::int64_t t : steps) s.times.push_back(static_cast<double>(t));
    return s;
}

SeriesRecord GameSeries::gap_series() const {
    SeriesRecord s;
    s.label = "gap";
    s.times.reserve(steps.size());
    s.values.reserve(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        s.times.push_back(static_cast<double>(steps[i]));
        s.values.push_back(static_cast<double>(gap[i]));
    }
    return s;
}

GameSeries run_game(const GameConfig& cfg, std::int64_t horizon_updates,
                    RngStream& rng) {
    cfg.validate();
    if (horizon_updates < cfg.record_every)
        throw std::invalid_argument(
            "run_game: horizon shorter than one recording interval");

    Engine e(cfg, init_book(cfg, rng), /*with_table=*/true);
    ExternalForce force = draw_force(cfg, 0, rng);

    std::vector<std::int64_t> snaps = cfg.snapshot_at;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    std::size_t snap_next = 0;

    GameSeries out;
    const auto rows = static_cast<std::size_t>(
        horizon_updates / cfg.record_every);
    out.steps.reserve(rows);
    out.price.reserve(rows);
    out.ask.reserve(rows);
    out.bid.reserve(rows);
    out.gap.reserve(rows);
    out.delta_ext.reserve(rows);

    if (snap_next < snaps.size() && snaps[snap_next] == 0) {
        out.snapshots.push_back({0, e.state()});
        ++snap_next;
    }
    for (std::int64_t t = 0; t < horizon_updates; ++t) {
        if (e.state().time_step >= force.next_switch)
            force = draw_force(cfg, e.state().time_step, rng);
        const std::size_t i = e.select(rng, SelectionMethod::rejection);
        const int d = e.propose(i, force.strength, rng);
        e.apply(i, d, rng);

        const std::int64_t now = e.state().time_step;
        if (now % cfg.record_every == 0) {
            const MarketQuote q = e.market_quote();
            out.steps.push_back(now);
            out.price.push_back(q.price);
            out.ask.push_back(q.ask);
            out.bid.push_back(q.bid);
            out.gap.push_back(e.gap());
            out.delta_ext.push_back(force.strength);
        }
        while (snap_next < snaps.size() && snaps[snap_next] == now) {
            out.snapshots.push_back({now, e.state()});
            ++snap_next;
        }
    }
    return out;
}

}  // namespace stalker
