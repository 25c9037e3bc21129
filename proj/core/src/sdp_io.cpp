#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tkmp/errors.hpp"
#include "tkmp/sdp.hpp"

namespace tkmp {

void write_sdp(std::ostream& os, const SdpProblem& problem) {
  const auto old = os.precision(17);
  os << "# tkmp sdp: maximize c^T x s.t. A0_j + sum_i x_i Ai_j >= 0\n";
  os << "vars " << problem.num_vars << "\n";
  os << "blocks " << problem.blocks.size();
  for (const auto& b : problem.blocks) os << ' ' << b.size;
  os << "\n";
  for (int i = 0; i < problem.num_vars; ++i) {
    if (problem.objective[i] != 0.0) os << "c " << i + 1 << ' ' << problem.objective[i] << "\n";
  }
  for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
    for (const auto& e : problem.blocks[j].entries) {
      os << j << ' ' << e.row << ' ' << e.col << ' ' << e.var << ' ' << e.value << "\n";
    }
  }
  os.precision(old);
}

SdpProblem read_sdp(std::istream& is) {
  SdpProblem p;
  std::string line;
  int lineno = 0;
  bool have_vars = false, have_blocks = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "vars") {
      ls >> p.num_vars;
      p.objective = Eigen::VectorXd::Zero(p.num_vars);
      have_vars = true;
    } else if (head == "blocks") {
      std::size_t nb = 0;
      ls >> nb;
      p.blocks.resize(nb);
      for (auto& b : p.blocks) ls >> b.size;
      have_blocks = true;
    } else if (head == "c") {
      int v = 0;
      double val = 0;
      ls >> v >> val;
      if (!have_vars || v < 1 || v > p.num_vars) throw ParseError("bad objective line", lineno, 1);
      p.objective[v - 1] = val;
    } else {
      std::istringstream es(line);
      std::size_t blk = 0;
      int r = 0, c = 0, v = 0;
      double val = 0;
      if (!(es >> blk >> r >> c >> v >> val) || !have_blocks || blk >= p.blocks.size()) {
        throw ParseError("bad entry line", lineno, 1);
      }
      p.blocks[blk].add(v, r, c, val);
      continue;
    }
    if (ls.fail()) throw ParseError("malformed header line", lineno, 1);
  }
  p.validate();
  return p;
}

}  // namespace tkmp
