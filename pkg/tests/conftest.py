from __future__ import annotations

import pytest

from sentag.schema import parse_schema

BASIC_SCHEMA = """<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">
  <xs:element name="claim">
    <xs:complexType>
      <xs:attribute name="id" use="required"/>
      <xs:attribute name="GRAPH"/>
    </xs:complexType>
  </xs:element>
  <xs:element name="premise">
    <xs:complexType>
      <xs:attribute name="stance" default="pro">
        <xs:simpleType>
          <xs:restriction base="xs:string">
            <xs:enumeration value="pro"/>
            <xs:enumeration value="con"/>
          </xs:restriction>
        </xs:simpleType>
      </xs:attribute>
      <xs:attribute name="GRAPH"/>
    </xs:complexType>
  </xs:element>
  <xs:element name="note">
    <xs:complexType>
      <xs:attribute name="author"/>
    </xs:complexType>
  </xs:element>
</xs:schema>"""


@pytest.fixture
def basic_tagset():
    return parse_schema(BASIC_SCHEMA, schema_id="sc_test")


@pytest.fixture(autouse=True)
def fast_password_hash(monkeypatch):
    """Drop the scrypt work factor for tests; verification still reads the
    parameters back out of each stored hash."""
    from sentag.server import auth

    monkeypatch.setattr(auth, "_SCRYPT_N", 2**4)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", None) != "call":
                continue
            if "test_acceptance.py" not in report.nodeid:
                continue
            name = report.nodeid.split("::")[-1]
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"{verdict}  {name}")
