import json

import pytest

from main import (
    EXIT_IO,
    EXIT_NON_MONOTONIC,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY_FAILED,
    run,
)


def _json(capsys):
    return json.loads(capsys.readouterr().out)


class TestMagic:
    def test_t_tensor_t(self, capsys):
        assert run(["--quiet", "magic", "--named", "T-tensor-T", "--starts", "8"]) == EXIT_OK
        out = _json(capsys)
        assert out["state"] == "named:T-tensor-T"
        assert out["m_lin"] == pytest.approx(0.4375, abs=1e-12)
        assert out["m_nl"] <= 1e-8
        assert out["optimizer"]["starts"] == 8

    def test_full_search(self, capsys):
        assert run(["--quiet", "magic", "--named", "T-tensor-T", "--starts", "6", "--agree", "0"]) == EXIT_OK
        assert _json(capsys)["optimizer"]["agree"] == 0

    def test_bell(self, capsys):
        assert run(["--quiet", "magic", "--stabilizer", "39", "--starts", "4"]) == EXIT_OK
        out = _json(capsys)
        assert out["e_lin"] == pytest.approx(0.5)
        assert out["m_lin"] == pytest.approx(0.0, abs=1e-12)

    def test_amps(self, capsys):
        assert run(["--quiet", "magic", "--amps", "1", "0", "0", "0", "0", "0", "0", "0", "--starts", "2"]) == EXIT_OK
        out = _json(capsys)
        assert out["state"].startswith("amps")
        assert out["m_nl"] == pytest.approx(0.0, abs=1e-10)

    def test_huge_amps(self, capsys):
        code = run(["--quiet", "magic", "--amps", "1e308", "0", "0", "0", "1e308", "0", "0", "0", "--starts", "4"])
        assert code == EXIT_OK
        out = _json(capsys)
        assert out["m_lin"] == pytest.approx(0.0, abs=1e-12)
        assert out["e_lin"] == pytest.approx(0.0, abs=1e-12)

    def test_bad_state_is_usage_error(self, capsys):
        assert run(["--quiet", "magic", "--stabilizer", "61"]) == EXIT_USAGE
        assert "✗" in capsys.readouterr().err

    def test_zero_amps(self):
        assert run(["--quiet", "magic", "--amps", "0", "0", "0", "0", "0", "0", "0", "0"]) == EXIT_USAGE

    def test_argparse_rejects_two_sources(self):
        with pytest.raises(SystemExit) as err:
            run(["magic", "--stabilizer", "1", "--named", "bell"])
        assert err.value.code == 2


class TestSweep:
    def test_writes_dataset(self, tmp_path, capsys):
        target = tmp_path / "moller.csv"
        code = run([
            "--threads", "1", "sweep", "moller", "--group", "G3", "--theta-steps", "3",
            "--nl-method", "antiflatness", "--output", str(target),
        ])
        assert code == EXIT_OK
        lines = target.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "theta_rad,group,m_lin,m_nl,f_a_times4,e_lin,not_converged"
        assert len(lines) == 4
        assert "3 rows" in capsys.readouterr().err

    def test_stdout_json(self, capsys):
        code = run([
            "--quiet", "sweep", "nn", "--delta-range", "0", "0.7853981633974483", "--steps", "2",
            "--nl-method", "antiflatness", "--format", "json",
        ])
        assert code == EXIT_OK
        rows = _json(capsys)
        assert rows[1]["m_lin_bar"] == pytest.approx(0.3, abs=1e-12)

    def test_thread_count_gives_identical_bytes(self, tmp_path):
        outputs = []
        for threads in ("1", "3"):
            target = tmp_path / f"t{threads}.csv"
            assert run([
                "--quiet", "--threads", threads, "sweep", "moller", "--initial", "all",
                "--theta-steps", "5", "--nl-method", "antiflatness", "--output", str(target),
            ]) == EXIT_OK
            outputs.append(target.read_bytes())
        assert outputs[0] == outputs[1]

    def test_phase_file(self, tmp_path, phase_file):
        path = phase_file("p_lab_MeV,delta0_deg,delta1_deg\n10,0,0\n20,0,45\n")
        target = tmp_path / "nn.csv"
        assert run([
            "--quiet", "sweep", "nn", "--phase-file", str(path), "--nl-method", "antiflatness",
            "--output", str(target),
        ]) == EXIT_OK
        assert target.read_text(encoding="utf-8").splitlines()[1].startswith("10,")

    def test_phase_file_excludes_grid(self, phase_file):
        path = phase_file("p_lab_MeV,delta0_deg,delta1_deg\n10,0,0\n")
        assert run(["--quiet", "sweep", "nn", "--phase-file", str(path), "--steps", "5"]) == EXIT_USAGE

    def test_missing_phase_file(self, tmp_path):
        assert run(["--quiet", "sweep", "nn", "--phase-file", str(tmp_path / "absent.csv")]) == EXIT_IO

    def test_non_monotonic_phase_file(self, phase_file):
        path = phase_file("p_lab_MeV,delta0_deg,delta1_deg\n20,0,0\n10,0,45\n")
        assert run(["--quiet", "sweep", "nn", "--phase-file", str(path)]) == EXIT_NON_MONOTONIC

    def test_bad_unit(self, phase_file):
        path = phase_file("p_lab_MeV,delta0_grad,delta1_deg\n10,0,0\n")
        assert run(["--quiet", "sweep", "nn", "--phase-file", str(path)]) == EXIT_USAGE

    def test_theta_endpoint_rejected(self):
        assert run(["--quiet", "sweep", "moller", "--theta-range", "0", "1"]) == EXIT_USAGE

    def test_bad_thread_count(self):
        assert run(["--quiet", "--threads", "0", "sweep", "moller"]) == EXIT_USAGE


class TestOtherCommands:
    def test_clifford_average_exhaustive(self, capsys):
        assert run(["--quiet", "clifford-average", "--named", "T-tensor-T", "--mode", "exhaustive"]) == EXIT_OK
        out = _json(capsys)
        assert out["std_err"] == 0.0
        assert out["mean_f"] == pytest.approx(out["c_times_mlin"], abs=1e-12)

    def test_tomo_exact(self, capsys):
        assert run(["--quiet", "tomo", "--stabilizer", "39"]) == EXIT_OK
        out = _json(capsys)
        assert out["estimate"] == pytest.approx(0.0, abs=1e-15)
        assert out["shots"] is None

    def test_stabilizers_list(self, capsys):
        assert run(["--quiet", "stabilizers", "list"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 61
        assert lines[0].startswith("index,re_00,im_00")
        assert lines[39].startswith("39,") and ",true," in lines[39]

    def test_groups(self, capsys):
        assert run(["--quiet", "groups", "nn"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "index,group" and len(lines) == 61

    def test_groups_audit(self, capsys):
        assert run(["--quiet", "groups", "moller", "--audit", "--points", "5"]) == EXIT_OK
        assert list(_json(capsys)["unassigned"]) == ["43"]


class TestVerify:
    def test_passing_suite(self, capsys):
        assert run(["--quiet", "verify", "clifford-id", "--n", "2"]) == EXIT_OK
        assert _json(capsys)["passed"] is True

    def test_failing_suite(self, capsys):
        code = run([
            "verify", "clifford-id", "--mode", "sampled", "--samples", "20", "--sigmas", "0",
        ])
        assert code == EXIT_VERIFY_FAILED
        captured = capsys.readouterr()
        assert json.loads(captured.out)["passed"] is False
        assert "✗ clifford-id" in captured.err

    def test_groups_nn(self):
        assert run(["--quiet", "verify", "groups-nn", "--points", "5"]) == EXIT_OK

    def test_four_af_on_processes(self, capsys):
        code = run(["--quiet", "--threads", "2", "--processes", "verify", "four-af", "--n", "3", "--starts", "12"])
        assert code == EXIT_OK
        assert _json(capsys)["info"]["states"] == 3
