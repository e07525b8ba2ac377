#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "stalker/rng.hpp"
#include "stalker/stats.hpp"

namespace stalker {

// How the scalar market price is formed from the ask/bid pair.
enum class PriceFormula { mid, half_spread };

// What decides a trader's drift direction: the sign of his distance to the
// price (drift toward it), or his ownership role (owners up, seekers down).
enum class DriftRule { sign, role };

struct GameConfig {
    std::int64_t n_traders = 2000;
    std::int64_t n_shares = 1000;
    double gamma = 1.5;
    int l = 4;                        // proposals live in {-l, ..., l}
    double drift_magnitude = 0.1;     // log-scale pull per unit move
    double ext_mean = 0.12;           // mean of the |log strength| draws
    std::int64_t ext_rate_steps = 2000;  // mean updates between force renewals
    std::int64_t jump_away_min = 5;   // post-trade displacement k is uniform
    std::int64_t jump_away_max = 20;  // on {jump_away_min..jump_away_max}
    std::int64_t record_every = 100;
    std::int64_t init_spread = 400;   // width of the initial opinion interval
    std::int64_t init_gap = 0;        // extra upward shift of initial owners
    PriceFormula price_formula = PriceFormula::mid;
    DriftRule drift_rule = DriftRule::sign;
    std::vector<std::int64_t> snapshot_at;  // update counts to snapshot after

    // Throws std::invalid_argument listing every violated constraint.
    void validate() const;
};

// Opinions and ownership of all traders; exactly n_shares flags are set and
// after every completed update the owners are the top-n_shares traders in
// the (opinion desc, index asc) order.
struct OrderBookState {
    std::vector<std::int64_t> opinions;
    std::vector<std::uint8_t> owns;  // 0/1 flags
    std::int64_t time_step = 0;
};

struct MarketQuote {
    std::int64_t ask = 0;  // smallest owner opinion
    std::int64_t bid = 0;  // largest non-owner opinion
    double price = 0.0;
};

// Multiplicative shock shared by all traders; renewed at random update
// counts with mean spacing ext_rate_steps.
struct ExternalForce {
    double strength = 1.0;
    std::int64_t next_switch = 0;
};

enum class SelectionMethod { rejection, cumulative };

// Fresh book: i.i.d. integer opinions spanning init_spread around zero,
// shares handed to the top-n_shares traders, owners then raised by init_gap.
OrderBookState init_book(const GameConfig& cfg, RngStream& rng);

// True iff the owners are exactly the top-n_shares traders under the tie rule.
bool is_stable(const OrderBookState& book);

MarketQuote quote(const OrderBookState& book,
                  PriceFormula formula = PriceFormula::mid);

// One trader index drawn with probability proportional to
// (1 + |p_i - price|)^{-gamma}.  Both methods sample that law exactly.
std::size_t select_trader(const OrderBookState& book, double gamma,
                          RngStream& rng,
                          SelectionMethod method = SelectionMethod::rejection,
                          PriceFormula formula = PriceFormula::mid);

// New force value plus the update count at which it expires.
ExternalForce draw_force(const GameConfig& cfg, std::int64_t now,
                         RngStream& rng);

// Exact move law for combined bias q: mass min(q^d, 1)/(2l+1) at d != 0,
// remainder at d = 0.  Index j of the result holds d = j - l.
std::vector<double> move_pmf(double q, int l);

// Proposal for trader i under the current force: an integer in [-l, l].
int propose_move(const OrderBookState& book, std::size_t i,
                 const ExternalForce& ext, const GameConfig& cfg,
                 RngStream& rng);

// Commits the move if the book stays stable; otherwise executes the trade
// with the boundary counterparty and the symmetric jump away from the
// pre-trade quote.  Always returns a stable book with time_step advanced.
OrderBookState apply_update(const OrderBookState& book, std::size_t i, int d,
                            const GameConfig& cfg, RngStream& rng);

// One full update: renew the force if due, then select, propose, apply.
std::pair<OrderBookState, ExternalForce> step(const OrderBookState& book,
                                              const ExternalForce& ext,
                                              const GameConfig& cfg,
                                              RngStream& rng);

struct BookSnapshot {
    std::int64_t step = 0;
    OrderBookState book;
};

// Row-per-recording run output; gap is the opinion difference between the
// descending ranks ceil(0.475 N) and ceil(0.525 N).
struct GameSeries {
    std::vector<std::int64_t> steps;
    std::vector<double> price;
    std::vector<std::int64_t> ask;
    std::vector<std::int64_t> bid;
    std::vector<std::int64_t> gap;
    std::vector<double> delta_ext;
    std::vector<BookSnapshot> snapshots;

    SeriesRecord price_series() const;  // label "price"
    SeriesRecord gap_series() const;    // label "gap"
};

GameSeries run_game(const GameConfig& cfg, std::int64_t horizon_updates,
                    RngStream& rng);

}  // namespace stalker
