package soot;

import java.util.ArrayList;
import java.util.List;

/** Manages the SootClasses of the application being analyzed. */
public class Scene {
    private final List<SootClass> classes = new ArrayList<>();
    private SootClass mainClass;

    /** Loads the given class and resolves it to the requested level. */
    public SootClass loadClass(String className, int desiredLevel) {
        SootClass toReturn = SootResolver.v().resolveClass(className, desiredLevel);
        // remember every class we hand out
        classes.add(toReturn);
        return toReturn;
    }

    /** Returns the main class of the application, failing when none was set. */
    public SootClass getMainClass() {
        if (mainClass == null) {
            throw new RuntimeException("There is no main class set!");
        }
        return mainClass;
    }

    /** Wraps a class name in double quotes for messages. */
    static String quote(String fromString) {
        StringBuilder sb = new StringBuilder(fromString.length() + 2);
        sb.append('"');
        for (char ch : fromString.toCharArray()) {
            if (ch == '"' || ch == '\\') {
                sb.append('\\');
            }
            sb.append(ch);
        }
        return sb.append('"').toString();
    }
}
