#include "graphtest/datasets.hpp"
#include "graphtest/errors.hpp"
#include "graphtest/generator.hpp"
#include "graphtest/io.hpp"
#include "test_support.hpp"

#include <sstream>

using namespace graphtest;

TEST(Generator, ParameterCounts) {
  EXPECT_EQ(GeneratorParams::affine(10, 2).values().size(), 22);
  EXPECT_EQ(GeneratorParams::tanh_mlp(10, 32, 2).values().size(), 32 * 11 + 2 * 33);
  EXPECT_THROW(GeneratorParams::affine(0, 2), ParameterError);
}

TEST(Generator, AffineForwardIsWzPlusB) {
  auto g = GeneratorParams::affine(2, 1);
  g.values() << 2.0, -1.0, 0.5;
  Matrix z(2, 2);
  z << 1, 1, 3, 0;
  const Matrix x = g.forward(z);
  EXPECT_DOUBLE_EQ(x(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(x(1, 0), 6.5);
}

TEST(Generator, BackwardMatchesFiniteDifferences) {
  Engine rng(1);
  for (auto g : {GeneratorParams::affine(3, 2), GeneratorParams::tanh_mlp(3, 5, 2)}) {
    g.initialize(rng);
    g.values() += 0.1 * Vector::Random(g.values().size());
    const Matrix z = oracle::random_points(7, 3, rng);
    const Matrix up = oracle::random_points(7, 2, rng);
    const Vector grad = g.backward(z, up);
    for (Index p = 0; p < g.values().size(); ++p) {
      auto f = [&](double v) {
        GeneratorParams h = g;
        h.values()[p] = v;
        return (h.forward(z).array() * up.array()).sum();
      };
      EXPECT_NEAR(grad[p], oracle::central_difference(f, g.values()[p], 1e-6), 1e-7);
    }
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam adam(3, {0.1, 0.9, 0.999, 1e-8});
  Vector p = Vector::Zero(3);
  adam.step(p, Vector{{2.0, -0.5, 0.0}});
  EXPECT_NEAR(p[0], -0.1, 1e-8);
  EXPECT_NEAR(p[1], 0.1, 1e-8);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(adam.iterations(), 1);
}

TEST(Adam, MinimisesAQuadratic) {
  Adam adam(2, {0.05, 0.9, 0.999, 1e-8});
  Vector p{{3.0, -2.0}};
  for (int i = 0; i < 2000; ++i) adam.step(p, 2.0 * (p - Vector{{1.0, 1.0}}));
  EXPECT_NEAR(p[0], 1.0, 1e-3);
  EXPECT_NEAR(p[1], 1.0, 1e-3);
}

TEST(Datasets, MoonsGeometry) {
  Engine rng(2);
  const Matrix m = make_moons(100, 0.0, rng);
  ASSERT_EQ(m.rows(), 100);
  for (Index i = 0; i < 50; ++i) EXPECT_NEAR(m.row(i).norm(), 1.0, 1e-12);
  for (Index i = 50; i < 100; ++i)
    EXPECT_NEAR((m.row(i) - Eigen::RowVector2d(1.0, 0.5)).norm(), 1.0, 1e-12);
}

TEST(Datasets, ShiftedScaledNormalMoments) {
  Engine rng(3);
  const Matrix x = shifted_scaled_normal(40000, 3, 1.5, 3.0, rng);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  EXPECT_NEAR(mean[0], 1.5, 0.05);
  EXPECT_NEAR(mean[1], 0.0, 0.02);
  const double var0 = (x.col(0).array() - mean[0]).square().mean();
  const double var2 = (x.col(2).array() - mean[2]).square().mean();
  EXPECT_NEAR(var0, 9.0, 0.2);
  EXPECT_NEAR(var2, 1.0, 0.03);
}

TEST(Io, ParsesCsv) {
  const PointSample s = parse_points_csv("1,2\n3.5, -4e-1\n\n");
  ASSERT_EQ(s.size(), 2);
  EXPECT_EQ(s.points()(1, 1), -0.4);
}

TEST(Io, RejectsMalformedCsv) {
  EXPECT_THROW(parse_points_csv("1,2\n3\n"), InvalidInputError);
  EXPECT_THROW(parse_points_csv("1,x\n"), InvalidInputError);
  EXPECT_THROW(parse_points_csv("1,nan\n"), InvalidInputError);
  try {
    parse_points_csv("1,2\n1,2,3\n", "a.csv");
    FAIL();
  } catch (const InvalidInputError& e) {
    EXPECT_NE(std::string(e.what()).find("a.csv:2"), std::string::npos);
  }
}

TEST(Io, MissingFileNamesThePath) {
  try {
    read_points_csv("/nonexistent/points.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/points.csv"), std::string::npos);
  }
}

TEST(Io, RoundTripsNumbers) {
  Engine rng(4);
  const Matrix x = oracle::random_points(5, 3, rng);
  std::ostringstream out;
  write_points_csv(out, x);
  EXPECT_EQ(parse_points_csv(out.str()).points(), x);
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Io, CsvTableAndSvg) {
  CsvTable t{{"a", "b"}, {{"1", "2"}, {"3", "4"}}};
  std::ostringstream out;
  t.write(out);
  EXPECT_EQ(out.str(), "a,b\n1,2\n3,4\n");
  const std::string svg = svg_scatter({{Matrix::Identity(2, 2), "red", "pts"}}, "t");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("circle"), std::string::npos);
  EXPECT_NE(svg_polyline({1, 2, 3}, "loss").find("polyline"), std::string::npos);
}
