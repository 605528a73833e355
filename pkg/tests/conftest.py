"""Shared sources and fixtures: the building-automation demo program."""

from __future__ import annotations

import pytest

from pantagruel import check_program, parse_program

BUILDING_SPEC = """\
interface MotionDetector {
      attribute room : Integer
      event detected : Boolean  }
interface Light {
      attribute room : Integer
      action switch( Boolean ) }
interface Fan {
      attribute room : Integer
      action setSpeed( Integer ) }
interface TemperatureSensor {
      event temperature : Integer }

m10:MotionDetector { room : 101 }
m20:MotionDetector { room : 201 }

l10:Light { room : 101 }
l11:Light { room : 101 }
l20:Light { room : 201 }

fan10:Fan { room : 101 }
fan20:Fan { room : 201 }

thermo:TemperatureSensor{}
"""

RULE_1 = """\
(1) when
       event detected from m:MotionDetector value = true
     trigger
       action switch(true) on l:Light with room = m.room
    end
"""

# as written in the demo corpus: aggregated, rejected by the checker
RULE_2_AGGREGATE = """\
(2) when
       all event detected from m:MotionDetector value = false groupby room
     trigger
       action switch(false) on l:Light with room = m.room
    end
"""

# the runnable rewrite: same reaction, no aggregation
RULE_2_PLAIN = """\
(2) when
       event detected from m:MotionDetector value = false
     trigger
       action switch(false) on l:Light with room = m.room
    end
"""

RULE_3 = """\
(3) when
       event switch from l:Light value = true
       and  event temperature from thermo value = 30
    trigger
       action setSpeed(10) on f:Fan with room = l.room
    end
"""


def program_source(*rules: str) -> str:
    return BUILDING_SPEC + "\nrules\n" + "".join(rules) + "end\n"


BUILDING_FULL = program_source(RULE_1, RULE_2_AGGREGATE, RULE_3)
BUILDING_RUNNABLE = program_source(RULE_1, RULE_2_PLAIN, RULE_3)
BUILDING_RULES_13 = program_source(RULE_1, RULE_3)


@pytest.fixture(scope="session")
def building_ast():
    return parse_program(BUILDING_RUNNABLE)


@pytest.fixture()
def building():
    """A freshly checked runnable program (rules 1, 2-rewritten, 3)."""
    checked = check_program(parse_program(BUILDING_RUNNABLE))
    assert checked.ok
    return checked


@pytest.fixture()
def building_13():
    checked = check_program(parse_program(BUILDING_RULES_13))
    assert checked.ok
    return checked
