#include "qrm/pipeline.h"

#include "qrm/frontend.h"

namespace qrm {

Compiled compile(const Program& p, const ImageConfig& cfg) {
  Compiled c;
  c.source = p;
  c.hl = transform(p);
  c.mid = translate(c.hl.program);
  check_pairing(c.mid);
  c.low = lower(c.mid);
  c.image = assemble(c.low, cfg);
  return c;
}

Compiled compile(const std::string& src, const ImageConfig& cfg) { return compile(parse(src), cfg); }

Execution execute(const Image& img, const std::map<std::string, Word>& inputs, const Eigen::VectorXcd& psi,
                  const EvalOptions& eopt, const MachineOptions& mopt) {
  Execution ex;
  ex.eval = evaluate(img, inputs, eopt);
  if (ex.eval.timeout) throw EvalError("partial evaluation timed out");
  Image loaded = img;
  apply(loaded, ex.eval);
  Machine m(std::move(loaded), mopt);
  m.load(ex.eval.qvars, psi);
  m.run(ex.eval.t_exe);
  ex.result = extract_qvar_state(m, ex.eval.qvars);
  ex.costs = m.costs();
  ex.max_norm_error = m.max_norm_error();
  ex.finished = m.finished();
  return ex;
}

std::vector<VarKey> var_keys(const std::vector<QVar>& qvars) {
  std::vector<VarKey> out;
  for (const auto& q : qvars) out.push_back({q.name, q.index});
  return out;
}

ClassicalState classical_inputs(const std::map<std::string, Word>& inputs) {
  ClassicalState s;
  for (const auto& [k, v] : inputs) s.set({k, std::nullopt}, v);
  return s;
}

}  // namespace qrm
