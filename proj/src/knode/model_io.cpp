#include "knodest/knode/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace knodest::knode {

namespace {

constexpr const char* kMagic = "knodest-model v1";

void write_matrix(std::ostream& os, const char* name, const Mat& m) {
    os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << m(i, j);
        }
        os << '\n';
    }
}

void write_vector(std::ostream& os, const char* name, const Vec& v) {
    os << name << ' ' << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        os << v(i);
    }
    os << '\n';
}

struct Reader {
    std::ifstream in;
    int line_no = 0;
    std::string path;

    explicit Reader(const std::string& p) : in(p), path(p) {
        if (!in) throw Error("load_model: cannot open " + p);
    }

    std::string next_line() {
        std::string line;
        if (!std::getline(in, line)) {
            throw ParseError(path + ": unexpected end of file after line " +
                             std::to_string(line_no));
        }
        ++line_no;
        return line;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
    }

    // "name <dims...>" header followed by whitespace-separated values.
    Mat read_matrix(const std::string& name) {
        std::istringstream hdr(next_line());
        std::string got;
        Eigen::Index rows = 0, cols = 0;
        if (!(hdr >> got >> rows >> cols) || got != name) fail("expected matrix header " + name);
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            std::istringstream row(next_line());
            for (Eigen::Index j = 0; j < cols; ++j) {
                if (!(row >> m(i, j))) fail("bad value in matrix " + name);
            }
        }
        return m;
    }

    Vec read_vector(const std::string& name) {
        std::istringstream hdr(next_line());
        std::string got;
        Eigen::Index size = 0;
        if (!(hdr >> got >> size) || got != name) fail("expected vector header " + name);
        Vec v(size);
        std::istringstream row(next_line());
        for (Eigen::Index i = 0; i < size; ++i) {
            if (!(row >> v(i))) fail("bad value in vector " + name);
        }
        return v;
    }
};

}  // namespace

void save_model(const ModelArtifact& artifact, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("save_model: cannot open " + path);
    os << std::setprecision(17);
    const auto& p = artifact.params;
    const auto& tc = artifact.train_config;
    os << kMagic << '\n';
    os << "prior " << artifact.prior_id << '\n';
    os << "dims " << p.state_dim() << ' ' << p.input_dim << ' ' << p.hidden() << '\n';
    os << "train epochs " << tc.epochs << " hidden " << tc.hidden << " lr " << tc.learning_rate
       << " beta1 " << tc.beta1 << " beta2 " << tc.beta2 << " eps " << tc.epsilon << " dt "
       << tc.dt << " seed " << tc.seed << " burn_in_skip " << tc.burn_in_skip << '\n';
    os << "fingerprint " << artifact.dataset_fingerprint << '\n';
    os << "best_loss " << artifact.best_loss << '\n';
    write_matrix(os, "w1", p.w1);
    write_vector(os, "b1", p.b1);
    write_matrix(os, "w2", p.w2);
    write_vector(os, "b2", p.b2);
    if (!os) throw Error("save_model: write failed for " + path);
}

ModelArtifact load_model(const std::string& path) {
    Reader r(path);
    if (r.next_line() != kMagic) r.fail("not a model file (bad magic)");

    ModelArtifact art;
    {
        std::istringstream ls(r.next_line());
        std::string key;
        if (!(ls >> key >> art.prior_id) || key != "prior") r.fail("expected prior line");
    }
    int n = 0, p = 0, hidden = 0;
    {
        std::istringstream ls(r.next_line());
        std::string key;
        if (!(ls >> key >> n >> p >> hidden) || key != "dims" || n < 1 || hidden < 1 || p < 0) {
            r.fail("expected dims line");
        }
    }
    {
        std::istringstream ls(r.next_line());
        std::string key, k2;
        auto& tc = art.train_config;
        if (!(ls >> key >> k2 >> tc.epochs) || key != "train" || k2 != "epochs") {
            r.fail("expected train line");
        }
        if (!(ls >> k2 >> tc.hidden >> k2 >> tc.learning_rate >> k2 >> tc.beta1 >> k2 >>
              tc.beta2 >> k2 >> tc.epsilon >> k2 >> tc.dt >> k2 >> tc.seed >> k2 >>
              tc.burn_in_skip)) {
            r.fail("malformed train line");
        }
    }
    {
        const std::string line = r.next_line();
        if (line.rfind("fingerprint ", 0) != 0) r.fail("expected fingerprint line");
        art.dataset_fingerprint = line.substr(12);
    }
    {
        std::istringstream ls(r.next_line());
        std::string key;
        if (!(ls >> key >> art.best_loss) || key != "best_loss") r.fail("expected best_loss line");
    }

    art.params.w1 = r.read_matrix("w1");
    art.params.b1 = r.read_vector("b1");
    art.params.w2 = r.read_matrix("w2");
    art.params.b2 = r.read_vector("b2");
    art.params.input_dim = p;
    if (art.params.state_dim() != n || art.params.hidden() != hidden ||
        art.params.w1.cols() != n + p) {
        r.fail("parameter shapes do not match dims");
    }
    if (!art.params.w1.allFinite() || !art.params.b1.allFinite() ||
        !art.params.w2.allFinite() || !art.params.b2.allFinite()) {
        r.fail("non-finite parameters");
    }
    return art;
}

}  // namespace knodest::knode
