// Writes the oracle fixtures consumed by the test suite:
//   lowregret_fixtures <out_dir>

#include "../tests/support/fixture_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fx = lowregret::fixtures;
namespace oracle = lowregret::oracle;

namespace {

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class FixtureFile {
public:
    explicit FixtureFile(const std::filesystem::path& path) : out_(path), path_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << fx::header() << '\n';
    }
    void add(const std::string& family, double s, double x, const oracle::QuadratureResult& r,
             const oracle::QuadratureSpec& spec) {
        out_ << family << ',' << number(s) << ',' << number(x) << ',' << number(r.value) << ','
             << number(r.error_estimate) << ',' << fx::row_hash(family, s, x, spec) << '\n';
        ++rows_;
    }
    ~FixtureFile() { std::cout << path_.string() << ": " << rows_ << " rows\n"; }

private:
    std::ofstream out_;
    std::filesystem::path path_;
    int rows_ = 0;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: lowregret_fixtures <out_dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    try {
        std::filesystem::create_directories(dir);
        const auto spec = fx::profile_spec();
        const double orders[] = {0.25, 0.5, 0.75};

        {
            FixtureFile file(dir / "power_profile.csv");
            const double xs[] = {-0.8, -0.6, -0.3, 0.0, 0.3, 0.6, 0.8};
            for (const double s : orders) {
                const auto w = [s](double y) {
                    const double u = 1.0 - y * y;
                    return u > 0.0 ? std::pow(u, s) : 0.0;
                };
                for (const double x : xs) {
                    file.add("power_profile", s, x, oracle::quadrature_apply(w, x, s, spec), spec);
                }
            }
        }
        {
            FixtureFile file(dir / "normal_derivative.csv");
            const double points[] = {-2.0, 1.5, 2.0, 4.0, 8.0, 16.0};
            const auto w = [](double y) {
                const double u = 1.0 - y * y;
                return u > 0.0 ? std::sqrt(u) : 0.0;
            };
            for (const double s : orders) {
                for (const double p : points) {
                    file.add("normal_derivative", s, p,
                             oracle::normal_derivative_quadrature(w, -1.0, 1.0, p, s, spec), spec);
                }
            }
        }
        {
            FixtureFile file(dir / "normalization.csv");
            for (const double s : orders) {
                const oracle::QuadratureResult r{oracle::normalization_constant_reference(s), 0.0};
                file.add("normalization", s, 0.0, r, spec);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "fixture generation failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
