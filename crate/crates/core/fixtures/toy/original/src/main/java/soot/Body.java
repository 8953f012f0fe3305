package soot;

import java.util.ArrayList;
import java.util.List;

/**
 * Abstract base class that models the body (code attached) of a method.
 * A body holds locals, units and traps.
 */
public class Body {
    protected UnitPatchingChain unitChain;
    protected Chain<Local> localChain;

    /**
     * Returns the units of this body.
     *
     * @return a chain of units
     */
    public UnitPatchingChain getUnits() {
        // the chain is shared, callers may patch it
        UnitPatchingChain units = unitChain;
        return units;
    }

    /**
     * Returns the list of boxes containing values used in this body.
     */
    public List<ValueBox> getUseBoxes() {
        List<ValueBox> useBoxList = new ArrayList<ValueBox>();
        // collect uses of every unit
        for (Unit item : unitChain) {
            useBoxList.addAll(item.getUseBoxes());
        }
        return useBoxList;
    }

    /**
     * Returns the list of boxes containing values defined in this body.
     */
    public List<ValueBox> getDefBoxes() {
        List<ValueBox> defBoxList = new ArrayList<ValueBox>();
        // collect definitions of every unit
        for (Unit item : unitChain) {
            defBoxList.addAll(item.getDefBoxes());
        }
        return defBoxList;
    }

    /**
     * Verifies that each Local of getUseAndDefBoxes() is in this body's locals Chain.
     */
    public void validateLocals() {
        for (ValueBox vb : getUseBoxes()) {
            validateLocal(vb);
        }
        for (ValueBox vb : getDefBoxes()) {
            validateLocal(vb);
        }
    }

    private void validateLocal(ValueBox vb) {
        Value value = vb.getValue();
        if (value instanceof Local && !localChain.contains(value)) {
            throw new RuntimeException("Local not in chain : " + value);
        }
    }
}
