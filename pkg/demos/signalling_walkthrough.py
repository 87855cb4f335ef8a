"""One user of each kind walked through its association state machine.

Prints the transition log as each machine consumes its event sequence,
then runs the conformance auditor over the collected trace. Flip the
TAMPER flag to forge one record and watch the audit name the exact
divergence.

Run:  python3 demos/signalling_walkthrough.py
"""

from coexsim.signalling import (GrantRecord, SaDrxFsm, SaDtxFsm,
                                SignallingTrace, TransitionRecord, UcaFsm,
                                conformance_check, fsm_step)

TAMPER = False

trace = SignallingTrace()


def drive(fsm, script):
    print(f"-- {fsm.KIND} ({fsm.ue_id}), starts {fsm.state!r}")
    for time_us, event, info in script:
        before = fsm.state
        after, emitted = fsm_step(fsm, event, time_us, **info)
        sent = f"  -> sends {', '.join(emitted)}" if emitted else ""
        print(f"   {time_us:>6} us  {before:<22} --{event}--> {after}{sent}")
    print()


# carrier-aggregation user: control plane on the licensed band
drive(UcaFsm("lte-00", trace), [
    (0, "assoc-request", {}),
    (10, "ul-grant", {}),
    (20, "identity", {}),
    (30, "rrc", {}),
    (500, "beacon", {}),
])

# standalone uplink user: associates over the air, then one 6+4 cycle
dtx_script = [(500, "beacon", {}), (510, "identity", {}),
              (1000, "data-request", {"n": 6})]
dtx_script += [(1000 + 1000 * (k + 1), "subframe-tick", {}) for k in range(10)]
drive(SaDtxFsm("lte-01", trace), dtx_script)
trace.record_grant(GrantRecord("lte-01", 1000, 7064, n_subframes=6))

# standalone downlink user: periodic control-channel checks
drive(SaDrxFsm("lte-02", trace), [
    (2000, "subframe-tick", {}),
    (2000, "pdcch-absent", {}),
    (3000, "subframe-tick", {}),
    (3000, "pdcch-present", {}),
    (3010, "identity", {}),
])

if TAMPER:
    rec = trace.transitions[4]
    trace.transitions[4] = TransitionRecord(
        rec.time_us, rec.ue_id, rec.state_before, rec.event,
        "dtx-sleep", rec.detail)

report = conformance_check(trace)
print(f"conformance: {'PASS' if report.passed else 'FAIL'}"
      f"  ({report.transitions_checked} transitions, "
      f"{report.grants_checked} grants, {report.cycles_checked} cycles)")
if not report.passed:
    print(f"  first violation: {report.first_violation}")
