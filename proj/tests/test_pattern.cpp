#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <limits>
#include <vector>

#include "gibbs/errors.hpp"
#include "gibbs/group.hpp"
#include "gibbs/pattern.hpp"
#include "gibbs/site.hpp"

using namespace gibbs;

TEST_CASE("alphabet basics") {
  Alphabet p4 = Alphabet::prefix(4);
  CHECK(p4.size() == 4);
  CHECK(p4.min_letter() == 0);
  CHECK(p4.max_letter() == 3);
  CHECK(p4.contains(2));
  CHECK(!p4.contains(4));
  CHECK(p4.index_of(3) == 3);
  CHECK(p4.index_of(9) < 0);

  Alphabet odd(std::vector<Letter>{7, 1, 5, 1});  // unsorted with a duplicate
  CHECK(odd.size() == 3);
  CHECK(odd[0] == 1);
  CHECK(odd[2] == 7);
  CHECK(odd.index_of(5) == 1);

  CHECK_THROWS_AS(Alphabet(std::vector<Letter>{}), ConfigError);
  CHECK_THROWS_AS(Alphabet::prefix(0), ConfigError);
}

TEST_CASE("pattern storage follows the canonical site order") {
  SiteSet sup({Site{{2}}, Site{{0}}, Site{{1}}});
  Pattern p(sup, {10, 11, 12});  // letters aligned to sorted sites 0,1,2
  CHECK(p.size() == 3);
  CHECK(p.at(Site{{0}}) == 10);
  CHECK(p.at(Site{{1}}) == 11);
  CHECK(p.at(Site{{2}}) == 12);
  CHECK(p.at_index(2) == 12);
  CHECK(!p.try_at(Site{{3}}).has_value());
  CHECK_THROWS_AS(p.at(Site{{3}}), ConfigError);
  CHECK_THROWS_AS(Pattern(sup, {1, 2}), ConfigError);

  Pattern c = Pattern::constant(sup, 5);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.at_index(i) == 5);
  CHECK(Pattern::empty().is_empty());
}

TEST_CASE("restriction and override") {
  SiteSet sup({Site{{0}}, Site{{1}}, Site{{2}}});
  Pattern p(sup, {1, 2, 3});

  Pattern r = p.restrict_to(SiteSet({Site{{1}}, Site{{7}}}));
  CHECK(r.size() == 1);
  CHECK(r.at(Site{{1}}) == 2);

  Pattern over(SiteSet({Site{{2}}, Site{{3}}}), {9, 8});
  Pattern q = p.overridden_by(over);
  CHECK(q.size() == 4);
  CHECK(q.at(Site{{0}}) == 1);
  CHECK(q.at(Site{{2}}) == 9);  // override wins on the overlap
  CHECK(q.at(Site{{3}}) == 8);

  // Overriding by the empty pattern is the identity.
  CHECK(p.overridden_by(Pattern::empty()) == p);
}

TEST_CASE("pattern translation on the line") {
  auto ctx = make_lattice(1, LatticeNorm::linf);
  Pattern p(SiteSet({Site{{0}}, Site{{3}}}), {4, 7});

  // Acting by g moves the letter seen at s to s g^{-1}.
  Pattern t = p.translated(*ctx, Site{{3}});
  CHECK(t.size() == 2);
  CHECK(t.at(Site{{-3}}) == 4);
  CHECK(t.at(Site{{0}}) == 7);

  // Round trip through the inverse.
  CHECK(t.translated(*ctx, ctx->inverse(Site{{3}})) == p);

  // Composition: acting by g then h equals acting by h*g.
  Site g{{2}}, h{{-5}};
  CHECK(p.translated(*ctx, g).translated(*ctx, h) ==
        p.translated(*ctx, ctx->multiply(h, g)));

  // Translating by the identity is the identity map.
  CHECK(p.translated(*ctx, ctx->identity()) == p);
}

TEST_CASE("pattern translation on a nonabelian table group") {
  const char* s3 = R"({
    "elements": ["a", "b", "e", "ab", "ba", "aba"],
    "identity": "e",
    "generators": ["a", "b"],
    "mul": [[2, 3, 0, 1, 5, 4],
            [4, 2, 1, 5, 0, 3],
            [0, 1, 2, 3, 4, 5],
            [5, 0, 3, 4, 2, 1],
            [1, 5, 4, 2, 3, 0],
            [3, 4, 5, 0, 1, 2]],
    "inv": [0, 1, 2, 4, 3, 5]
  })";
  auto ctx = TableGroup::from_json_text(s3);
  const Site a{{0}}, e{{2}};

  Pattern p(SiteSet({e}), {3});
  // e.a^{-1} = a, so the letter lands on a.
  Pattern t = p.translated(*ctx, a);
  CHECK(t.at(a) == 3);
  CHECK(t.translated(*ctx, ctx->inverse(a)) == p);

  Site g{{3}}, h{{4}};  // ab and ba: composition order matters here
  Pattern full(SiteSet({Site{{0}}, Site{{1}}, Site{{2}}}), {1, 2, 3});
  CHECK(full.translated(*ctx, g).translated(*ctx, h) ==
        full.translated(*ctx, ctx->multiply(h, g)));
}

TEST_CASE("boundary condition semantics") {
  auto ctx = make_lattice(1, LatticeNorm::linf);
  BoundaryCondition x(0, Pattern(SiteSet({Site{{5}}}), {7}));
  CHECK(x.background() == 0);
  CHECK(x.at(Site{{5}}) == 7);
  CHECK(x.at(Site{{4}}) == 0);

  // (g.x)(h) = x(h g): with g = 2, the new configuration reads 7 at h = 3.
  BoundaryCondition y = x.translated(*ctx, Site{{2}});
  CHECK(y.at(Site{{3}}) == 7);
  CHECK(y.at(Site{{5}}) == 0);
  for (std::int64_t h = -10; h <= 10; ++h)
    CHECK(y.at(Site{{h}}) == x.at(ctx->multiply(Site{{h}}, Site{{2}})));

  BoundaryCondition z = x.overridden_by(Pattern(SiteSet({Site{{5}}, Site{{6}}}), {1, 2}));
  CHECK(z.at(Site{{5}}) == 1);
  CHECK(z.at(Site{{6}}) == 2);
  CHECK(z.at(Site{{0}}) == 0);
  CHECK(x == BoundaryCondition(0, Pattern(SiteSet({Site{{5}}}), {7})));
}

TEST_CASE("tuple enumeration order, count, and budget") {
  Alphabet A = Alphabet::prefix(3);
  std::vector<std::vector<Letter>> seen;
  for_each_tuple(A, 2, 1000, [&](const std::vector<Letter>& t) { seen.push_back(t); });
  REQUIRE(seen.size() == 9);
  CHECK(seen.front() == std::vector<Letter>{0, 0});
  CHECK(seen[1] == std::vector<Letter>{0, 1});  // last position runs fastest
  CHECK(seen.back() == std::vector<Letter>{2, 2});
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1] < seen[i]);

  std::size_t calls = 0;
  for_each_tuple(A, 0, 10, [&](const std::vector<Letter>& t) {
    ++calls;
    CHECK(t.empty());
  });
  CHECK(calls == 1);

  CHECK(tuple_count(4, 3) == 64);
  CHECK(tuple_count(2, 0) == 1);
  CHECK(tuple_count(1000000, 5) == std::numeric_limits<std::uint64_t>::max());
  CHECK_THROWS_AS(for_each_tuple(Alphabet::prefix(4), 3, 63,
                                 [](const std::vector<Letter>&) {}),
                  ResourceError);
}
