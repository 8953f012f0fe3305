package sootup.core.jimple.basic;

/** A local variable, used within Body classes. Immutable. */
public class Local {
    private final String name;
    private final Type type;

    /** Returns the name of this object. */
    public String getName() {
        String localName = name;
        if (localName == null) {
            throw new IllegalStateException("unnamed local");
        }
        return localName;
    }

    /** Creates a copy of this local with the given type. */
    public Local withType(Type type) {
        if (type == null) {
            throw new IllegalArgumentException("type must not be null");
        }
        return new Local(name, type);
    }
}
