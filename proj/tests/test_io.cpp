#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "r2f/config.hpp"
#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/random.hpp"

using namespace r2f;

TEST_CASE("format_double round trips") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.between(-30, 30));
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK_THROWS_AS(parse_double("abc"), Error);
  CHECK_THROWS_AS(parse_double("1.5x"), Error);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("atomic write replaces the file whole") {
  const auto path = (std::filesystem::temp_directory_path() / "r2f_atomic.txt").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  // a regular file cannot be a parent directory
  CHECK_THROWS_AS(write_file_atomic(path + "/y.txt", "z"), Error);
  std::filesystem::remove(path);
}

TEST_CASE("run config: defaults, merging and overrides") {
  RunConfig c;
  CHECK(c.retrieval().k == 5);
  CHECK(c.model().kernel_count == 11);
  CHECK(c.train().epochs == 5);
  c.merge_text("# comment\nretrieval.k = 3\n\nfusion.method=kernel  # trailing\n");
  CHECK(c.retrieval().k == 3);
  CHECK(c.model().evidence_slots == 3);
  CHECK(c.model().fusion == FusionMethod::kKernel);
  c.set("retrieval.k", "7");
  CHECK(c.retrieval().k == 7);
  c.set_seed(9);
  CHECK(c.train().seed == 9);
  CHECK(c.synthetic().seed == 9);
  CHECK(c.retrieval().random_seed == 9);
  CHECK(c.to_text().find("retrieval.k=7\n") != std::string::npos);

  CHECK_THROWS_AS(c.merge_text("nonsense\n"), ParseError);
  CHECK_THROWS_AS(c.merge_text("no.such.key=1\n"), ParseError);
  CHECK_THROWS_AS(c.set("no.such.key", "1"), Error);
  c.set("retrieval.k", "five");
  CHECK_THROWS_AS(c.retrieval(), Error);
  c.set("retrieval.k", "0");
  CHECK_THROWS_AS(c.retrieval(), Error);
  c.set("retrieval.k", "5");
  c.set("train.threshold", "2");
  CHECK_THROWS_AS(c.train(), Error);
  c.set("train.threshold", "0.5");
  CHECK(c.sweep_ks() == std::vector<std::size_t>{3, 4, 5, 6, 7});
}
