#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "stalker/opinion_game.hpp"
#include "stalker/rng.hpp"
#include "support/stat_test_utils.hpp"

using stalker::ExternalForce;
using stalker::GameConfig;
using stalker::OrderBookState;
using stalker::RngStream;

namespace {

OrderBookState make_book(std::vector<std::int64_t> opinions,
                         std::vector<std::uint8_t> owns) {
  OrderBookState b;
  b.opinions = std::move(opinions);
  b.owns = std::move(owns);
  return b;
}

GameConfig small_config(std::int64_t n, std::int64_t m) {
  GameConfig cfg;
  cfg.n_traders = n;
  cfg.n_shares = m;
  return cfg;
}

// Independent ownership oracle: sort every trader by (opinion desc, index
// asc) and demand the flags mark exactly the first m.
void check_top_m(const OrderBookState& book, std::int64_t m) {
  std::vector<std::size_t> idx(book.opinions.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (book.opinions[a] != book.opinions[b])
      return book.opinions[a] > book.opinions[b];
    return a < b;
  });
  std::int64_t held = 0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const bool should_own = static_cast<std::int64_t>(r) < m;
    REQUIRE(static_cast<bool>(book.owns[idx[r]]) == should_own);
    held += book.owns[idx[r]];
  }
  REQUIRE(held == m);
}

}  // namespace

TEST_CASE("game config validation aggregates every problem") {
  GameConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  cfg.n_shares = cfg.n_traders;  // too many shares
  cfg.l = 0;
  cfg.ext_mean = 0.0;
  cfg.jump_away_min = 9;
  cfg.jump_away_max = 4;
  try {
    cfg.validate();
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("n_shares") != std::string::npos);
    CHECK(msg.find("l must") != std::string::npos);
    CHECK(msg.find("ext_mean") != std::string::npos);
    CHECK(msg.find("jump_away") != std::string::npos);
  }
}

TEST_CASE("initial book: spread, top-M ownership, gap shift, determinism") {
  GameConfig cfg;
  RngStream r(70000, 0);
  auto book = stalker::init_book(cfg, r);
  REQUIRE(book.opinions.size() == 2000);
  REQUIRE(book.owns.size() == 2000);
  CHECK(book.time_step == 0);
  for (auto p : book.opinions) {
    CHECK(p >= -200);
    CHECK(p <= 200);
  }
  check_top_m(book, cfg.n_shares);
  CHECK(stalker::is_stable(book));

  RngStream r2(70000, 0);
  auto again = stalker::init_book(cfg, r2);
  CHECK(again.opinions == book.opinions);
  CHECK(again.owns == book.owns);

  // raising the initial owners shifts exactly them and keeps the same set
  GameConfig wide = cfg;
  wide.init_gap = 37;
  RngStream r3(70000, 0);
  auto shifted = stalker::init_book(wide, r3);
  CHECK(shifted.owns == book.owns);
  for (std::size_t i = 0; i < book.opinions.size(); ++i) {
    const std::int64_t want = book.opinions[i] + (book.owns[i] ? 37 : 0);
    CHECK(shifted.opinions[i] == want);
  }
  CHECK(stalker::is_stable(shifted));
}

TEST_CASE("quotes and stability on hand-built books") {
  auto book = make_book({1, 5, 3, 7}, {0, 1, 0, 1});
  CHECK(stalker::is_stable(book));
  auto q = stalker::quote(book);
  CHECK(q.ask == 5);
  CHECK(q.bid == 3);
  CHECK(q.price == 4.0);
  CHECK(stalker::quote(book, stalker::PriceFormula::half_spread).price == 1.0);

  CHECK(!stalker::is_stable(make_book({1, 5, 3, 7}, {1, 0, 0, 1})));

  // the index rule decides ties: lower index outranks at equal opinion
  CHECK(stalker::is_stable(make_book({5, 5, 5, 5}, {1, 1, 0, 0})));
  CHECK(!stalker::is_stable(make_book({5, 5, 5, 5}, {0, 1, 1, 0})));

  auto flat = stalker::quote(make_book({9, 2, 9, 2}, {1, 0, 1, 0}));
  CHECK(flat.ask == 9);
  CHECK(flat.bid == 2);

  CHECK_THROWS(stalker::quote(make_book({1, 2}, {1, 1})));
  CHECK_THROWS(stalker::quote(make_book({1, 2}, {0, 0})));

  // every randomly initialized stable book quotes ask >= bid
  GameConfig cfg = small_config(50, 17);
  cfg.init_spread = 30;  // dense: plenty of boundary ties
  for (std::uint64_t s = 0; s < 10000; ++s) {
    RngStream rr(70500, s);
    auto b = stalker::init_book(cfg, rr);
    auto qq = stalker::quote(b);
    CHECK(qq.ask >= qq.bid);
  }
}

TEST_CASE("selection frequencies follow the distance weights") {
  // forty traders on a line; the top half owns, so price sits at -0.5 and
  // every weight is known in closed form
  std::vector<std::int64_t> ops(40);
  std::vector<std::uint8_t> owns(40);
  for (int i = 0; i < 40; ++i) {
    ops[static_cast<std::size_t>(i)] = i - 20;
    owns[static_cast<std::size_t>(i)] = i >= 20;
  }
  auto book = make_book(ops, owns);
  auto q = stalker::quote(book);
  REQUIRE(q.price == -0.5);

  const double gamma = 1.3;
  std::vector<double> weight(40);
  for (int i = 0; i < 40; ++i)
    weight[static_cast<std::size_t>(i)] =
        std::pow(1.0 + std::abs((i - 20) - q.price), -gamma);
  const double z = std::accumulate(weight.begin(), weight.end(), 0.0);

  const int n_draws = 1000000;
  std::vector<double> rej(40, 0.0), cum(40, 0.0);
  RngStream r(71000, 0);
  for (int k = 0; k < n_draws; ++k)
    rej[stalker::select_trader(book, gamma, r)] += 1.0;
  const int n_cum = 200000;
  RngStream rc(71000, 1);
  for (int k = 0; k < n_cum; ++k)
    cum[stalker::select_trader(book, gamma, rc,
                               stalker::SelectionMethod::cumulative)] += 1.0;

  std::vector<double> expect_rej(40), expect_cum(40);
  for (int i = 0; i < 40; ++i) {
    expect_rej[static_cast<std::size_t>(i)] = n_draws * weight[static_cast<std::size_t>(i)] / z;
    expect_cum[static_cast<std::size_t>(i)] = n_cum * weight[static_cast<std::size_t>(i)] / z;
  }
  // both sampling routes reproduce the law itself, hence each other
  CHECK(stattest::chi2_test(rej, expect_rej) > 0.01);
  CHECK(stattest::chi2_test(cum, expect_cum) > 0.01);

  // gamma = 0 erases the distances entirely
  std::vector<double> uni(40, 0.0), expect_uni(40, 200000.0 / 40.0);
  RngStream ru(71000, 2);
  for (int k = 0; k < 200000; ++k)
    uni[stalker::select_trader(book, 0.0, ru)] += 1.0;
  CHECK(stattest::chi2_test(uni, expect_uni) > 0.01);

  // equidistant pair splits evenly
  auto pair_book = make_book({0, 4}, {0, 1});
  RngStream rp(71000, 3);
  int first = 0;
  for (int k = 0; k < 10000; ++k)
    first += stalker::select_trader(pair_book, 1.0, rp) == 0;
  auto ci = stattest::wilson95(static_cast<std::size_t>(first), 10000);
  CHECK(ci.lo < 0.5);
  CHECK(ci.hi > 0.5);

  CHECK_THROWS(stalker::select_trader(book, -1.0, r));
}

TEST_CASE("move law: closed form, normalization, sampled frequencies") {
  // balanced bias: uniform over all nine displacements
  auto flat = stalker::move_pmf(1.0, 4);
  REQUIRE(flat.size() == 9);
  for (auto m : flat) CHECK(m == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  // upward bias e^{0.1}: full mass on the uphill side, damped downhill
  const double up = std::exp(0.1);
  auto pmf = stalker::move_pmf(up, 4);
  for (int d = 1; d <= 4; ++d)
    CHECK(pmf[static_cast<std::size_t>(d + 4)] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  for (int d = -4; d <= -1; ++d)
    CHECK(pmf[static_cast<std::size_t>(d + 4)] ==
          doctest::Approx(std::exp(0.1 * d) / 9.0).epsilon(1e-14));
  for (double q : {0.3, 1.0, 1.7, std::exp(-0.22)}) {
    auto p = stalker::move_pmf(q, 4);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    for (auto m : p) CHECK(m >= 0.0);
  }
  CHECK_THROWS(stalker::move_pmf(0.0, 4));
  CHECK_THROWS(stalker::move_pmf(1.0, 0));

  // sampled proposals agree with the law for weak, neutral and strong bias;
  // the mover sits below the price, so his own pull is e^{+0.1}
  auto book = make_book({0, 10, 20, 30}, {0, 0, 1, 1});
  REQUIRE(stalker::quote(book).price == 15.0);
  GameConfig cfg = small_config(4, 2);
  for (double q : {std::exp(-0.22), 1.0, std::exp(0.22)}) {
    ExternalForce ext;
    ext.strength = q / std::exp(0.1);
    auto expect_pmf = stalker::move_pmf(q, cfg.l);
    std::vector<double> counts(expect_pmf.size(), 0.0), expect(expect_pmf);
    const int n = 200000;
    for (auto& e : expect) e *= n;
    RngStream r(72000, static_cast<std::uint64_t>(q * 1000));
    for (int k = 0; k < n; ++k) {
      int d = stalker::propose_move(book, 0, ext, cfg, r);
      counts[static_cast<std::size_t>(d + cfg.l)] += 1.0;
    }
    CHECK(stattest::chi2_test(counts, expect) > 0.01);
  }

  // a trader exactly at the price keeps only the external bias
  auto at_price = make_book({5, 5, 5, 2}, {1, 1, 0, 0});
  REQUIRE(stalker::quote(at_price).price == 5.0);
  ExternalForce neutral;
  neutral.strength = 1.0;
  std::vector<double> counts(9, 0.0), expect(9, 20000.0 / 9.0);
  RngStream r(72001, 0);
  for (int k = 0; k < 20000; ++k)
    counts[static_cast<std::size_t>(
        stalker::propose_move(at_price, 2, neutral, small_config(4, 2), r) + 4)] += 1.0;
  CHECK(stattest::chi2_test(counts, expect) > 0.01);
}

TEST_CASE("updates: in-band moves commit, boundary crossings trade") {
  GameConfig cfg = small_config(5, 3);
  auto book = make_book({10, 9, 5, 3, 0}, {1, 1, 1, 0, 0});
  REQUIRE(stalker::is_stable(book));

  SUBCASE("owner drops toward the bid but stays above: plain commit") {
    RngStream r(73000, 0);
    auto next = stalker::apply_update(book, 0, -4, cfg, r);
    CHECK(next.opinions == std::vector<std::int64_t>{6, 9, 5, 3, 0});
    CHECK(next.owns == book.owns);
    CHECK(next.time_step == 1);
  }

  SUBCASE("seeker crosses the ask: buys, both jump from the old quote") {
    RngStream probe(73001, 5);
    const std::int64_t k =
        cfg.jump_away_min +
        static_cast<std::int64_t>(probe.uniform_below(static_cast<std::uint64_t>(
            cfg.jump_away_max - cfg.jump_away_min + 1)));
    RngStream r(73001, 5);
    auto next = stalker::apply_update(book, 3, 3, cfg, r);
    // proposed landing spot 6 is discarded; the trade repositions both
    CHECK(next.opinions[3] == 5 + k);
    CHECK(next.opinions[2] == 5 - k);
    CHECK(next.owns == std::vector<std::uint8_t>{1, 1, 0, 1, 0});
    CHECK(next.opinions[0] == 10);
    CHECK(next.time_step == 1);
    CHECK(stalker::is_stable(next));
  }

  SUBCASE("owner undercuts the bid: sells to the highest bidder") {
    auto b = make_book({6, 9, 5, 3, 0}, {1, 1, 1, 0, 0});
    RngStream probe(73002, 9);
    const std::int64_t k =
        cfg.jump_away_min +
        static_cast<std::int64_t>(probe.uniform_below(static_cast<std::uint64_t>(
            cfg.jump_away_max - cfg.jump_away_min + 1)));
    RngStream r(73002, 9);
    auto next = stalker::apply_update(b, 0, -4, cfg, r);
    CHECK(next.opinions[0] == 3 - k);
    CHECK(next.opinions[3] == 3 + k);
    CHECK(next.owns == std::vector<std::uint8_t>{0, 1, 1, 1, 0});
    CHECK(stalker::is_stable(next));
  }

  SUBCASE("equal-opinion counterparties resolve to the lowest index") {
    auto tie_ask = make_book({5, 5, 9, 3, 1}, {1, 1, 1, 0, 0});
    RngStream probe(73003, 1);
    const std::int64_t k =
        cfg.jump_away_min +
        static_cast<std::int64_t>(probe.uniform_below(static_cast<std::uint64_t>(
            cfg.jump_away_max - cfg.jump_away_min + 1)));
    RngStream r(73003, 1);
    auto next = stalker::apply_update(tie_ask, 3, 4, cfg, r);
    CHECK(next.opinions[3] == 5 + k);  // buyer above the old ask
    CHECK(next.opinions[0] == 5 - k);  // displaced owner: index 0, not 1
    CHECK(next.opinions[1] == 5);
    CHECK(next.owns == std::vector<std::uint8_t>{0, 1, 1, 1, 0});

    auto tie_bid = make_book({9, 8, 6, 3, 3}, {1, 1, 1, 0, 0});
    RngStream probe2(73004, 2);
    const std::int64_t k2 =
        cfg.jump_away_min +
        static_cast<std::int64_t>(probe2.uniform_below(static_cast<std::uint64_t>(
            cfg.jump_away_max - cfg.jump_away_min + 1)));
    RngStream r2(73004, 2);
    auto next2 = stalker::apply_update(tie_bid, 2, -4, cfg, r2);
    CHECK(next2.opinions[2] == 3 - k2);
    CHECK(next2.opinions[3] == 3 + k2);  // promoted bidder: index 3, not 4
    CHECK(next2.opinions[4] == 3);
    CHECK(next2.owns == std::vector<std::uint8_t>{1, 1, 0, 1, 0});
  }

  SUBCASE("an owner landing on the bid with a lower index stays stable") {
    auto b = make_book({9, 8, 7, 3, 3}, {1, 1, 1, 0, 0});
    RngStream r(73005, 0);
    auto next = stalker::apply_update(b, 2, -4, cfg, r);
    CHECK(next.opinions[2] == 3);  // ties with traders 3, 4; index wins
    CHECK(next.owns == b.owns);
  }

  RngStream r(73006, 0);
  CHECK_THROWS(stalker::apply_update(book, 9, 1, cfg, r));
  CHECK_THROWS(stalker::apply_update(book, 0, 5, cfg, r));
  CHECK_THROWS(stalker::apply_update(book, 0, -5, cfg, r));
  // unstable input is rejected outright
  auto broken = make_book({10, 9, 5, 3, 0}, {1, 1, 0, 1, 0});
  CHECK_THROWS(stalker::apply_update(broken, 0, 1, cfg, r));
}

TEST_CASE("external force: symmetric log strength, mean renewal spacing") {
  GameConfig cfg;
  RngStream r(74000, 0);
  double sum_log = 0.0, sum_abs = 0.0, sum_wait = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    auto f = stalker::draw_force(cfg, 0, r);
    CHECK(f.strength > 0.0);
    CHECK(f.next_switch >= 1);
    const double lg = std::log(f.strength);
    sum_log += lg;
    sum_abs += std::abs(lg);
    sum_wait += static_cast<double>(f.next_switch);
  }
  CHECK(std::abs(sum_log / n) < 0.007);          // 4 sigma of mean 0
  CHECK(std::abs(sum_abs / n - 0.12) < 0.005);   // 4 sigma around 0.12
  CHECK(std::abs(sum_wait / n - 2000.0) < 80.0);

  // about one renewal per 2000 updates
  RngStream rs(74001, 0);
  double switches = 0.0;
  const int reps = 1000;
  for (int i = 0; i < reps; ++i) {
    auto f = stalker::draw_force(cfg, 0, rs);
    while (f.next_switch <= 2000) {
      f = stalker::draw_force(cfg, f.next_switch, rs);
      switches += 1.0;
    }
  }
  CHECK(switches / reps > 0.85);
  CHECK(switches / reps < 1.15);

  RngStream a(74002, 0), b(74002, 0);
  auto fa = stalker::draw_force(cfg, 5, a);
  auto fb = stalker::draw_force(cfg, 5, b);
  CHECK(fa.strength == fb.strength);
  CHECK(fa.next_switch == fb.next_switch);
}

TEST_CASE("ownership and top-M survive a long randomized run") {
  GameConfig cfg = small_config(300, 120);
  cfg.init_spread = 60;
  cfg.gamma = 1.4;
  RngStream r(71500, 0);
  auto book = stalker::init_book(cfg, r);
  ExternalForce force = stalker::draw_force(cfg, 0, r);

  int trades = 0;
  for (int t = 0; t < 200000; ++t) {
    auto before = book.owns;
    std::tie(book, force) = stalker::step(book, force, cfg, r);
    trades += before != book.owns;
    if ((t + 1) % 10000 == 0) {
      check_top_m(book, cfg.n_shares);
      CHECK(stalker::is_stable(book));
    }
  }
  CHECK(book.time_step == 200000);
  CHECK(trades > 100);  // the boundary is genuinely exercised
}

TEST_CASE("recorded gap equals the rank span of an independent sort") {
  for (std::int64_t n : {40, 2000}) {
    GameConfig cfg = small_config(n, n / 2);
    cfg.record_every = 1;
    cfg.snapshot_at = {1};
    RngStream r(75000, static_cast<std::uint64_t>(n));
    auto out = stalker::run_game(cfg, 1, r);
    REQUIRE(out.gap.size() == 1);
    REQUIRE(out.snapshots.size() == 1);
    const auto& book = out.snapshots[0].book;
    std::vector<std::int64_t> sorted = book.opinions;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto r_hi = static_cast<std::size_t>((19 * n + 39) / 40);
    const auto r_lo = static_cast<std::size_t>((21 * n + 39) / 40);
    CHECK(out.gap[0] == sorted[r_hi - 1] - sorted[r_lo - 1]);
  }
}

TEST_CASE("game runs: shape, snapshots, reproducibility") {
  GameConfig cfg = small_config(100, 40);
  cfg.init_spread = 80;
  cfg.snapshot_at = {0, 250, 1000};
  RngStream r(76000, 0);
  auto out = stalker::run_game(cfg, 1000, r);

  REQUIRE(out.steps.size() == 10);
  CHECK(out.steps.front() == 100);
  CHECK(out.steps.back() == 1000);
  for (std::size_t i = 0; i < out.steps.size(); ++i) {
    CHECK(out.ask[i] >= out.bid[i]);
    CHECK(out.gap[i] >= 0);
    CHECK(out.delta_ext[i] > 0.0);
    CHECK(out.price[i] == (static_cast<double>(out.ask[i] + out.bid[i])) / 2.0);
  }
  REQUIRE(out.snapshots.size() == 3);
  CHECK(out.snapshots[0].step == 0);
  CHECK(out.snapshots[1].step == 250);
  CHECK(out.snapshots[2].step == 1000);
  for (const auto& s : out.snapshots) {
    CHECK(s.book.time_step == s.step);
    CHECK(stalker::is_stable(s.book));
  }

  auto price = out.price_series();
  CHECK(price.label == "price");
  CHECK(price.values == out.price);
  auto gap = out.gap_series();
  CHECK(gap.label == "gap");
  REQUIRE(gap.size() == 10);
  CHECK(gap.times.front() == 100.0);

  RngStream r2(76000, 0);
  auto again = stalker::run_game(cfg, 1000, r2);
  CHECK(again.price == out.price);
  CHECK(again.gap == out.gap);
  CHECK(again.delta_ext == out.delta_ext);
  CHECK(again.snapshots[2].book.opinions == out.snapshots[2].book.opinions);

  RngStream other(76000, 1);
  auto different = stalker::run_game(cfg, 1000, other);
  CHECK(different.price != out.price);

  RngStream r3(76001, 0);
  CHECK_THROWS(stalker::run_game(cfg, 50, r3));  // shorter than one interval
}
