package soot;

import java.util.Map;

/** An abstract class which acts on a Body. This class provides a harness and acts as an interface for classes that wish to transform a Body. */
public class BodyTransformer {

    /** Called by clients of the transformation. Acts as a generic interface for BodyTransformers. */
    public final void transform(Body b, String phaseName, Map<String, String> options) {
        if (!PhaseOptions.getBoolean(options, "enabled")) {
            return;
        }
        // run the phase on the body
        internalTransform(b, phaseName, options);
    }

    /** Applies the phase to the body; subclasses override. */
    protected void internalTransform(Body b, String phaseName, Map<String, String> options) {
        for (Unit u : b.getUnits()) {
            u.redirectJumpsToThisTo(u);
        }
        b.validateLocals();
    }
}
